"""Run configuration: Hz-unit parameter tables, TOML serialization, defaults.

Configuration files carry the same quantities the literature tables quote
(q/h, eps_s/h, Omega/2pi in Hz; dimensionless hbar*D/eps_s) and round-trip
exactly: parse(serialize(c)) == c.
"""

from dataclasses import dataclass

try:
    import tomllib as _toml
except ModuleNotFoundError:  # python < 3.11
    import tomli as _toml

from .dynamics import DEFAULT_DT, DriveSpec, SystemParams
from .entropy import HistogramSpec
from .lyapunov import LleConfig


@dataclass(frozen=True)
class EnsembleConfig:
    """Randomization-run sizes; the full-scale member count sits behind --full."""

    n_ens: int = 1024
    full_n_ens: int = 128 * 128
    d_i: float = 5e-3
    t_f_tau: float = 90.0
    cadence_tau: float = 0.1

    def __post_init__(self):
        if self.n_ens < 2 or self.full_n_ens < 2 or self.d_i <= 0:
            raise ValueError("invalid ensemble config")
        if self.t_f_tau <= 0 or self.cadence_tau <= 0:
            raise ValueError("invalid ensemble time window")


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = SystemParams()
    drive: DriveSpec = DriveSpec.none()
    dt: float = DEFAULT_DT
    lle: LleConfig = LleConfig()
    hist: HistogramSpec = HistogramSpec()
    ensemble: EnsembleConfig = EnsembleConfig()
    seed: int = 0
    threads: int = 0  # 0 = library default

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def serialize(cfg: RunConfig) -> str:
    """TOML text capturing the full configuration."""
    p = cfg.params
    d = cfg.drive
    lines = [
        "[system]",
        f"q_over_h_hz = {_fmt(p.q_over_h)}",
        f"eps_s_over_h_hz = {_fmt(p.eps_s_over_h)}",
        f"rabi_hz = {_fmt(p.omega_rabi)}",
        "",
        "[drive]",
        f"amplitude_hbarD_over_eps = {_fmt(d.amplitude_hbarD_over_eps)}",
        f"freq_hz = {_fmt(d.freq_hz)}",
        f"direction = {_fmt(list(d.direction))}",
        "",
        "[integrator]",
        f"dt = {_fmt(cfg.dt)}",
        "",
        "[lle]",
        f"d0 = {_fmt(cfg.lle.d0)}",
        f"reset_time = {_fmt(cfg.lle.reset_time)}",
        f"n_iter = {_fmt(cfg.lle.n_iter)}",
        f"seed = {_fmt(cfg.lle.seed)}",
        f"stream = {_fmt(cfg.lle.stream)}",
        "",
        "[histogram]",
        f"bins_per_axis = {_fmt(cfg.hist.bins_per_axis)}",
        f"sample_period = {_fmt(cfg.hist.sample_period)}",
        f"n_samples = {_fmt(cfg.hist.n_samples)}",
        "",
        "[ensemble]",
        f"n_ens = {_fmt(cfg.ensemble.n_ens)}",
        f"full_n_ens = {_fmt(cfg.ensemble.full_n_ens)}",
        f"d_i = {_fmt(cfg.ensemble.d_i)}",
        f"t_f_tau = {_fmt(cfg.ensemble.t_f_tau)}",
        f"cadence_tau = {_fmt(cfg.ensemble.cadence_tau)}",
        "",
        "[run]",
        f"seed = {_fmt(cfg.seed)}",
        f"threads = {_fmt(cfg.threads)}",
    ]
    return "\n".join(lines) + "\n"


def parse(text: str) -> RunConfig:
    doc = _toml.loads(text)
    sys_t = doc.get("system", {})
    drv = doc.get("drive", {})
    integ = doc.get("integrator", {})
    lle = doc.get("lle", {})
    hist = doc.get("histogram", {})
    ens = doc.get("ensemble", {})
    run = doc.get("run", {})
    dflt = RunConfig()
    return RunConfig(
        params=SystemParams(
            q_over_h=float(sys_t.get("q_over_h_hz", dflt.params.q_over_h)),
            eps_s_over_h=float(sys_t.get("eps_s_over_h_hz", dflt.params.eps_s_over_h)),
            omega_rabi=float(sys_t.get("rabi_hz", dflt.params.omega_rabi)),
        ),
        drive=DriveSpec(
            amplitude_hbarD_over_eps=float(drv.get("amplitude_hbarD_over_eps", 0.0)),
            freq_hz=float(drv.get("freq_hz", 60.0)),
            direction=tuple(drv.get("direction", (0.0, 0.0, 1.0))),
        ),
        dt=float(integ.get("dt", dflt.dt)),
        lle=LleConfig(
            d0=float(lle.get("d0", dflt.lle.d0)),
            reset_time=float(lle.get("reset_time", dflt.lle.reset_time)),
            n_iter=int(lle.get("n_iter", dflt.lle.n_iter)),
            seed=int(lle.get("seed", dflt.lle.seed)),
            stream=int(lle.get("stream", dflt.lle.stream)),
        ),
        hist=HistogramSpec(
            bins_per_axis=int(hist.get("bins_per_axis", dflt.hist.bins_per_axis)),
            sample_period=float(hist.get("sample_period", dflt.hist.sample_period)),
            n_samples=int(hist.get("n_samples", dflt.hist.n_samples)),
        ),
        ensemble=EnsembleConfig(
            n_ens=int(ens.get("n_ens", dflt.ensemble.n_ens)),
            full_n_ens=int(ens.get("full_n_ens", dflt.ensemble.full_n_ens)),
            d_i=float(ens.get("d_i", dflt.ensemble.d_i)),
            t_f_tau=float(ens.get("t_f_tau", dflt.ensemble.t_f_tau)),
            cadence_tau=float(ens.get("cadence_tau", dflt.ensemble.cadence_tau)),
        ),
        seed=int(run.get("seed", 0)),
        threads=int(run.get("threads", 0)),
    )


_END_CONFIG = "--- end config ---"


def header_block(cfg: RunConfig, extra: dict = None) -> str:
    """Commented config echo placed at the top of every output file."""
    lines = ["# spinchaos output — self-reproducing header (--from-manifest reads this block)"]
    for ln in serialize(cfg).splitlines():
        lines.append("# " + ln if ln else "#")
    lines.append(f"# {_END_CONFIG}")
    for k, v in (extra or {}).items():
        lines.append(f"# {k} = {v}")
    return "\n".join(lines) + "\n"


def parse_header(text: str) -> RunConfig:
    """Recover a RunConfig from the commented header block of an output file."""
    body = []
    for ln in text.splitlines():
        if not ln.startswith("#"):
            break
        stripped = ln[1:].lstrip()
        if stripped.startswith("spinchaos output"):
            continue
        if stripped == _END_CONFIG:
            break
        body.append(stripped)
    return parse("\n".join(body))
