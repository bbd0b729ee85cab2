"""Package-wide knobs with spec'd defaults."""

# Fast-path / grid allocations above this size are refused (bytes).
MEMORY_CAP_BYTES = 2 * 1024 ** 3

# e^{-T_CUT} ~ 1e-20: integrand magnitude at the quadrature box boundary.
T_CUT = 46.0

# Torus scan resolution used to seed Newton ascent (per axis, d <= 2).
OMEGA_GRID_DEFAULT = 512
# d >= 3 full-product grids at 512 per axis do not fit in memory.
OMEGA_GRID_HIGH_DIM = 64

# Worker count handed to scipy.fft; results are reproducible at a fixed value.
FFT_WORKERS = 1


def set_memory_cap(nbytes):
    global MEMORY_CAP_BYTES
    if nbytes <= 0:
        raise ValueError("memory cap must be positive")
    MEMORY_CAP_BYTES = int(nbytes)


def set_fft_workers(n):
    global FFT_WORKERS
    FFT_WORKERS = max(1, int(n))
