"""Selection problem instances: pedigrees, relationship matrices, EBVs."""

import math
import pathlib
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    raise_dimension_mismatch,
    raise_exception,
    raise_input_error,
)
from .linalg import UpperTriangular, cholesky
from .solver_logging import get_logger

LOG = get_logger()

PEDIGREE_HEADER = ("id", "sire", "dam", "ebv")
SYMMETRY_TOLERANCE = 1e-12

Text = Union[str, bytes]
PathLike = Union[str, pathlib.Path]


def _decode(text: Text) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8-sig")
        except UnicodeDecodeError as error:
            raise_input_error(f"input is not valid UTF-8: {error}", __name__)
    return text


# -----------------------------------------------------------------------------
# Pedigree
# -----------------------------------------------------------------------------


class PedigreeRecord(NamedTuple):
    """One pedigree line. Parent id 0 means unknown."""

    id: int
    sire: int
    dam: int
    ebv: float


@dataclass(frozen=True)
class Pedigree:
    """Topologically ordered pedigree with dense ids 1..m."""

    records: Tuple[PedigreeRecord, ...]

    @property
    def m(self) -> int:
        """Number of individuals."""
        return len(self.records)

    @property
    def ebv(self) -> np.ndarray:
        """Estimated breeding values in id order."""
        return np.array([record.ebv for record in self.records], dtype=float)


def _parse_int(token: str, name: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise_input_error(f"unparsable {name} {token!r} at line {line_no}", __name__)
    return 0  # unreachable


def _parse_float(token: str, name: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        value = math.nan
    if not math.isfinite(value):
        raise_input_error(f"unparsable {name} {token!r} at line {line_no}", __name__)
    return value


def parse_pedigree(text: Text) -> Pedigree:
    """Parse a pedigree CSV.

    The first line must be the header ``id,sire,dam,ebv``. Line numbers in
    error messages count the header as line 1.

    :param text: file contents
    :returns: pedigree
    :raises InputError: on any malformed line
    """
    lines = _decode(text).splitlines()
    if not lines or tuple(t.strip() for t in lines[0].split(",")) != PEDIGREE_HEADER:
        raise_input_error("missing header line 'id,sire,dam,ebv'", __name__)

    records = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = [token.strip() for token in line.split(",")]
        if len(tokens) != 4:
            raise_input_error(
                f"expected 4 fields, got {len(tokens)} at line {line_no}", __name__
            )
        ident = _parse_int(tokens[0], "id", line_no)
        sire = _parse_int(tokens[1], "sire", line_no)
        dam = _parse_int(tokens[2], "dam", line_no)
        ebv = _parse_float(tokens[3], "ebv", line_no)

        if 1 <= ident <= len(records):
            raise_input_error(f"duplicate id {ident} at line {line_no}", __name__)
        if ident != len(records) + 1:
            raise_input_error(
                f"non-dense id {ident} at line {line_no}, expected {len(records) + 1}",
                __name__,
            )
        for parent in (sire, dam):
            if parent < 0:
                raise_input_error(
                    f"negative parent id {parent} at line {line_no}", __name__
                )
            if parent >= ident:
                raise_input_error(
                    f"parent id {parent} ≥ child id {ident} at line {line_no}",
                    __name__,
                )
        records.append(PedigreeRecord(ident, sire, dam, ebv))

    if not records:
        raise_input_error("no records", __name__)
    LOG.debug("Parsed pedigree with %d records", len(records))
    return Pedigree(tuple(records))


# -----------------------------------------------------------------------------
# Symmetric matrices
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix, read-only."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise_dimension_mismatch(
                f"matrix must be square, got shape {values.shape}", __name__
            )
        if values.size:
            scale = max(1.0, float(np.max(np.abs(values))))
            asym = float(np.max(np.abs(values - values.T)))
            if asym > SYMMETRY_TOLERANCE * scale:
                raise_input_error(f"matrix is not symmetric (max |A-Aᵀ| = {asym:.3e})", __name__)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        """Dimension m."""
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        if copy:
            return np.array(self.values, dtype=dtype, copy=True)
        return np.asarray(self.values, dtype=dtype)


def relationship_matrix(pedigree: Pedigree) -> SymMatrix:
    """Numerical relationship matrix by the tabular method.

    Row i is built from the rows of its parents, so parents must precede
    their offspring. Unknown parents contribute zero.

    :param pedigree: pedigree
    :returns: relationship matrix A
    """
    size = pedigree.m
    rel = np.zeros((size, size))
    for i, record in enumerate(pedigree.records):
        parents = [p - 1 for p in (record.sire, record.dam) if p > 0]
        if parents:
            row = 0.5 * rel[parents, :i].sum(axis=0)
            rel[i, :i] = row
            rel[:i, i] = row
        rel[i, i] = 1.0
        if len(parents) == 2:
            rel[i, i] += 0.5 * rel[parents[0], parents[1]]
    return SymMatrix(rel)


def format_matrix(matrix: SymMatrix) -> str:
    """Serialize a matrix in the matrix file format.

    Values are written with the shortest representation that reads back to
    the same float.

    :param matrix: matrix
    :returns: file contents
    """
    lines = [str(matrix.dim)]
    for row in matrix.values:
        lines.append(" ".join(repr(float(value)) for value in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: Text) -> SymMatrix:
    """Parse a matrix file: dimension on line 1, then m rows of m decimals.

    :param text: file contents
    :returns: matrix
    """
    lines = [line for line in _decode(text).splitlines() if line.strip()]
    if not lines:
        raise_input_error("empty matrix file", __name__)
    dim = _parse_int(lines[0].strip(), "dimension", 1)
    if dim < 1:
        raise_input_error(f"matrix dimension must be positive, got {dim}", __name__)
    if len(lines) - 1 != dim:
        raise_dimension_mismatch(
            f"matrix declares {dim} rows but has {len(lines) - 1}", __name__
        )
    values = np.empty((dim, dim))
    for i, line in enumerate(lines[1:]):
        tokens = line.split()
        if len(tokens) != dim:
            raise_dimension_mismatch(
                f"expected {dim} values, got {len(tokens)} at line {i + 2}", __name__
            )
        values[i] = [_parse_float(token, "value", i + 2) for token in tokens]
    return SymMatrix(values)


def format_ebv(ebv: Sequence[float]) -> str:
    """Serialize an EBV vector, one value per line.

    :param ebv: breeding values
    :returns: file contents
    """
    return "".join(repr(float(value)) + "\n" for value in ebv)


def parse_ebv(text: Text) -> np.ndarray:
    """Parse an EBV file, one decimal per line.

    :param text: file contents
    :returns: vector of breeding values
    """
    values = []
    for line_no, line in enumerate(_decode(text).splitlines(), start=1):
        if line.strip():
            values.append(_parse_float(line.strip(), "ebv", line_no))
    if not values:
        raise_input_error("no breeding values", __name__)
    return np.array(values)


# -----------------------------------------------------------------------------
# Instances
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class EdpInstance:
    """Equal-deployment selection problem.

    Choose exactly ``n_select`` of ``m`` candidates, each contributing
    1/``n_select``, maximising the mean breeding value subject to
    xᵀAx ≤ ``two_theta``.
    """

    A: SymMatrix
    g: np.ndarray
    n_select: int
    two_theta: float
    factor: UpperTriangular = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        validate_instance(self)
        object.__setattr__(self, "factor", cholesky(self.A))

    @property
    def m(self) -> int:
        """Number of candidates."""
        return self.A.dim

    @property
    def c0(self) -> float:
        """Cone radius √(2θN²), the bound on ‖Uy‖."""
        return math.sqrt(self.two_theta) * self.n_select

    @property
    def v0(self) -> float:
        """Radius of the cone ‖Uy‖ ≤ v₀ in the conic form; equal to c0."""
        return self.c0


def validate_instance(inst: EdpInstance) -> None:
    """Check the hard invariants of an instance.

    Only warns when the instance is certainly infeasible; feasibility itself
    is never proven here.

    :param inst: instance to check
    :raises InputError: if an invariant is violated
    """
    size = inst.A.dim
    if inst.g.shape != (size,):
        raise_exception(
            DimensionMismatchError,
            "DimensionMismatch",
            f"relationship matrix is {size}x{size} but EBV vector has length {inst.g.size}",
            __name__,
        )
    if not np.all(np.isfinite(inst.g)):
        raise_input_error("EBV vector contains non-finite values", __name__)
    if isinstance(inst.n_select, bool) or not isinstance(inst.n_select, (int, np.integer)):
        raise_input_error(f"N must be an integer, got {inst.n_select!r}", __name__)
    if not 1 <= inst.n_select <= size:
        raise_input_error(f"N must be in [1, {size}], got {inst.n_select}", __name__)
    if not (math.isfinite(inst.two_theta) and inst.two_theta > 0):
        raise_input_error(f"2θ must be positive, got {inst.two_theta}", __name__)

    values = inst.A.values
    diag = np.diag(values)
    off = values[~np.eye(size, dtype=bool)]
    if np.any(diag < 1 - SYMMETRY_TOLERANCE) or np.any(diag > 2 + SYMMETRY_TOLERANCE):
        raise_input_error("relationship matrix diagonal must lie in [1, 2]", __name__)
    if off.size and (np.any(off < -SYMMETRY_TOLERANCE) or np.any(off > 2 + SYMMETRY_TOLERANCE)):
        raise_input_error("relationship matrix off-diagonal must lie in [0, 2]", __name__)

    lower_bound = float(np.sort(diag)[: inst.n_select].sum()) / inst.n_select**2
    if lower_bound > inst.two_theta:
        LOG.warning(
            "Instance is infeasible: smallest possible diagonal term %.6g exceeds 2θ = %.6g",
            lower_bound,
            inst.two_theta,
        )


def group_coancestry(matrix: SymMatrix, selected: Iterable[int], n_select: int) -> float:
    """Coancestry xᵀAx of an equal-deployment selection.

    :param matrix: relationship matrix
    :param selected: 0-based candidate indices
    :param n_select: selection size N
    :returns: (1/N²)·Σ A_ij over selected pairs
    """
    index = np.fromiter(selected, dtype=int)
    block = matrix.values[np.ix_(index, index)]
    return float(block.sum()) / n_select**2


def load_instance(
    n_select: int,
    two_theta: float,
    pedigree: Optional[PathLike] = None,
    matrix: Optional[PathLike] = None,
    ebv: Optional[PathLike] = None,
) -> EdpInstance:
    """Load an instance from a pedigree or from a matrix and EBV file.

    :param n_select: selection size N
    :param two_theta: diversity cap 2θ
    :param pedigree: pedigree CSV path
    :param matrix: matrix file path
    :param ebv: EBV file path; overrides the pedigree EBVs when both are given
    :returns: validated instance
    """
    if (pedigree is None) == (matrix is None):
        raise_input_error("give exactly one of a pedigree or a matrix file", __name__)

    if pedigree is not None:
        ped = parse_pedigree(_read(pedigree))
        rel = relationship_matrix(ped)
        values = ped.ebv
    else:
        rel = parse_matrix(_read(matrix))
        if ebv is None:
            raise_input_error("a matrix file needs an EBV file", __name__)
        values = None
    if ebv is not None:
        values = parse_ebv(_read(ebv))

    inst = EdpInstance(rel, values, n_select, two_theta)
    LOG.info("Loaded instance with m = %d, N = %d, 2θ = %g", inst.m, n_select, two_theta)
    return inst


def _read(path: PathLike) -> bytes:
    try:
        return pathlib.Path(path).read_bytes()
    except OSError as error:
        raise_input_error(f"cannot read {path}: {error.strerror}", __name__)
    return b""  # unreachable
