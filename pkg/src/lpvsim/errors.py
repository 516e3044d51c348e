"""Exception hierarchy shared by all lpvsim modules.

Every exception carries a short machine-greppable ``code`` (``E_PARSE``,
``E_DIM``, ``E_WELLPOSED``, ``E_DOMAIN``, ``E_IO``, ``E_THRESHOLD``) that the
command-line front end prints on its single-line failure path.
"""

import numpy as np


class LpvError(Exception):
    """Base class for all lpvsim errors."""

    code = "E_PARSE"


class ParseError(LpvError):
    """Malformed model file, CSV content, or option mini-grammar."""

    code = "E_PARSE"


class DimensionError(LpvError):
    """Matrix, vector, or exponent shapes that do not fit together."""

    code = "E_DIM"


class DomainError(LpvError):
    """Scheduling point outside the box, or an invalid box itself."""

    code = "E_DOMAIN"


class DataError(LpvError):
    """Missing or unreadable input data (files, CSV columns, tables)."""

    code = "E_IO"


class ConfigError(LpvError):
    """Invalid run configuration (sampling times, grids, signal specs)."""

    code = "E_PARSE"


class WellposednessError(LpvError):
    """det(I - A(p)*Ts/2) is zero or numerically zero.

    Carries the offending frozen matrix ``A_p`` and sampling time ``ts``;
    when raised inside a simulation loop, ``step_index`` and ``p`` identify
    the sample at which the update matrices stopped existing.
    """

    code = "E_WELLPOSED"

    def __init__(self, message, A_p=None, ts=None, step_index=None, p=None):
        super().__init__(message)
        self.A_p = None if A_p is None else np.asarray(A_p, dtype=float)
        self.ts = ts
        self.step_index = step_index
        self.p = None if p is None else np.asarray(p, dtype=float)

    def at_step(self, step_index, p):
        """Copy of this error annotated with the simulation step it hit."""
        shown = [float(v) for v in np.asarray(p, dtype=float)]
        return WellposednessError(
            f"step k={step_index}, p={shown}: {self}",
            A_p=self.A_p,
            ts=self.ts,
            step_index=step_index,
            p=p,
        )
