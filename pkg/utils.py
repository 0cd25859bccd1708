import re
import math
import hashlib
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """One step of the splitmix64 finalizer on a 64-bit integer."""
    z = (state + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Seed for trial `index` of a batch seeded with `seed`; independent of execution order."""
    return splitmix64(splitmix64(seed & MASK64) ^ (index & MASK64))


def fingerprint(*arrays) -> str:
    """Short stable hash of the exact bytes of the given arrays or scalars."""
    digest = hashlib.sha256()
    for item in arrays:
        arr = np.ascontiguousarray(np.asarray(item))
        digest.update(str(arr.dtype).encode("ascii"))
        digest.update(repr(arr.shape).encode("ascii"))
        digest.update(arr.tobytes())
    return digest.hexdigest()[:16]


def format_float(value) -> str:
    """Shortest round-trip decimal text for a float; ints and strings pass through."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def log_grid(lo: float, hi: float, count: int) -> list[float]:
    """
    `count` log-spaced points from lo to hi, both included.

    Exponents are interpolated in base 10 so a grid symmetric around 1
    hits t = 1 exactly.
    """
    if not (lo > 0 and hi >= lo):
        raise ValueError(f"Grid bounds must satisfy 0 < lo <= hi, got {lo}, {hi}")
    if count < 1:
        raise ValueError(f"Grid count must be >= 1, got {count}")
    if count == 1:
        return [float(lo)]
    lo_e, hi_e = math.log10(lo), math.log10(hi)
    return [10.0 ** (lo_e + (hi_e - lo_e) * i / (count - 1)) for i in range(count)]


_GRID_RE = re.compile(r"^\s*([^:]+):([^:]+):(\d+)(?::(log|lin))?\s*$")


def parse_t_grid(text: str) -> list[float]:
    """
    Parse `lo:hi:count[:log|lin]` or a comma separated list of positive reals.

    Examples:
        >>> parse_t_grid("1e-3:1e3:3:log")
        [0.001, 1.0, 1000.0]
        >>> parse_t_grid("4,0.25")
        [4.0, 0.25]
    """
    match = _GRID_RE.match(text)
    if match:
        lo, hi = float(match.group(1)), float(match.group(2))
        count = int(match.group(3))
        if match.group(4) == "lin":
            if not (lo > 0 and hi >= lo) or count < 1:
                raise ValueError(f"Invalid linear grid: {text!r}")
            return [float(x) for x in np.linspace(lo, hi, count)]
        return log_grid(lo, hi, count)

    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"Invalid t grid: {text!r}")
    if not values:
        raise ValueError("t grid must not be empty")
    if any(not (v > 0 and math.isfinite(v)) for v in values):
        raise ValueError(f"t grid values must be positive and finite: {text!r}")
    return values
