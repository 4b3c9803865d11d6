"""Radio-level timing and bandwidth parameters shared across the chain."""

from dataclasses import dataclass


@dataclass(frozen=True)
class SystemParams:
    """Frame/chip timing, pulse duration, and receiver bandwidth.

    Defaults reproduce the reference link: 0.5 ns monocycle, 200 ns frames,
    1 ns chips, 100 chips per frame, 10 frames per symbol, 100 ns capture
    window, 2 GHz front-end bandwidth, 25 GHz simulation grid.
    """

    T_omega: float = 0.5e-9
    T_f: float = 200e-9
    T_c: float = 1e-9
    T_g: float = 100e-9
    N_f: int = 10
    N_c: int = 100
    W: float = 2e9
    f_sim: float = 25e9

    def __post_init__(self):
        for name in ("T_omega", "T_f", "T_c", "T_g", "W", "f_sim"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.N_f < 1 or self.N_c < 1:
            raise ValueError("N_f and N_c must be at least 1")
        if self.N_c * self.T_c > self.T_f + 1e-15 * self.T_f:
            raise ValueError("chip grid exceeds the frame: need N_c*T_c <= T_f")
        # all multipath from one frame must die out before the next frame's
        # earliest possible pulse, otherwise windows overlap across frames
        if self.T_f <= self.T_g + (self.N_c - 1) * self.T_c:
            raise ValueError(
                "inter-frame interference: need T_f > T_g + (N_c-1)*T_c")
        if self.f_sim < 2 * self.W:
            raise ValueError("simulation rate must satisfy f_sim >= 2*W")

    @property
    def T_s(self) -> float:
        """Symbol duration."""
        return self.N_f * self.T_f

    @property
    def dt(self) -> float:
        return 1.0 / self.f_sim

    def to_samples(self, duration: float) -> int:
        """Number of grid samples covering `duration` (rounded)."""
        return int(round(duration * self.f_sim))
