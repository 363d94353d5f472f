"""Batch verification runs with seeded sampling and stable reports.

The machine report format is versioned (v1) and line-oriented; numeric
fields use repr round-tripping so that parsing a report reproduces the
values bit-exactly.  Identical (scenario, samples, seed, tolerance) inputs
produce byte-identical machine reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .cohomology import DUALITY_CONVENTION
from .distributions import EllipticScenario, IdentityReport, verify_identity
from .endoscopy import EllipticElement

FORMAT_VERSION = 1
SAMPLING_BOX = 3.0
WALL_MARGIN = 1e-3

CONVENTIONS = (
    ("fourier_kernel", "exp(+i<.,.>) with <iu,iv> = -B(u,v), B positive definite"),
    ("a_data", "a_alpha = i * ratio with default ratio 1 on positive roots"),
    ("measure", "no extra 1/|W_real| factor in the kernel normalization"),
    ("weil_constant", "signature (p,q) -> exp(i*pi*(p-q)/4)"),
    ("duality_sign", DUALITY_CONVENTION),
    ("torus_twist", "compact-Cartan realization t_q = e(-rho_check/2)"),
    ("base_normalization", "transfer factor equals base_value on the base diagram"),
)


class VerificationRefused(RuntimeError):
    pass


@dataclass(frozen=True)
class PairRecord:
    index: int
    x_h: tuple[float, ...]
    x_g: tuple[float, ...]
    report: IdentityReport


@dataclass(frozen=True)
class RunReport:
    scenario: str
    samples: int
    seed: int
    tolerance: float
    records: tuple[PairRecord, ...]
    base_x_h: tuple[float, ...] = ()
    base_x_g: tuple[float, ...] = ()
    format_version: int = FORMAT_VERSION

    @property
    def pass_count(self) -> int:
        return sum(1 for r in self.records if r.report.passed)

    @property
    def max_abs_error(self) -> float:
        return max((r.report.abs_error for r in self.records), default=0.0)

    @property
    def max_termwise(self) -> float:
        return max((r.report.termwise_max for r in self.records), default=0.0)

    @property
    def all_passed(self) -> bool:
        return self.pass_count == len(self.records)


def sample_regular_vector(scenario: EllipticScenario, rng: random.Random) -> tuple[float, ...]:
    """Uniform on the coordinate box, rejecting a wall margin relative to
    the vector norm."""
    datum = scenario.engine.g_datum
    while True:
        v = tuple(rng.uniform(-SAMPLING_BOX, SAMPLING_BOX) for _ in range(datum.rank))
        norm = max(1e-30, sum(x * x for x in v) ** 0.5)
        ok = True
        for alpha in datum.positive_roots:
            val = sum(a * x for a, x in zip(alpha, v))
            if abs(val) < WALL_MARGIN * norm:
                ok = False
                break
        if ok:
            return v


def run_verify(
    scenario: EllipticScenario,
    samples: int,
    seed: int,
    tolerance: float = 1e-12,
) -> RunReport:
    engine = scenario.engine
    if not engine.datum.elliptic:
        raise VerificationRefused(
            "scenario refused: the endoscopic datum fails the ellipticity "
            "precondition of the elliptic reduction"
        )
    rng = random.Random(seed)
    records = []
    for idx in range(samples):
        x_h = EllipticElement(sample_regular_vector(scenario, rng), "H")
        x_g = EllipticElement(sample_regular_vector(scenario, rng), "G")
        report = verify_identity(scenario, x_h, x_g, tolerance)
        records.append(PairRecord(idx, x_h.floats(), x_g.floats(), report))
    base = scenario.engine.base_diagram
    return RunReport(
        scenario=scenario.name,
        samples=samples,
        seed=seed,
        tolerance=tolerance,
        records=tuple(records),
        base_x_h=base.x_h.floats(),
        base_x_g=base.x_g.floats(),
    )


def _fmt_complex(z: complex) -> str:
    return f"{z.real!r},{z.imag!r}"


def _fmt_vec(v) -> str:
    return " ".join(repr(float(x)) for x in v)


def emit_report(report: RunReport, fmt: str = "machine") -> str:
    if fmt == "machine":
        return _emit_machine(report)
    if fmt == "human":
        return _emit_human(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _emit_machine(report: RunReport) -> str:
    lines = [
        "# endotransfer verification report",
        f"format_version = {report.format_version}",
        f"scenario = {report.scenario}",
        f"samples = {report.samples}",
        f"seed = {report.seed}",
        f"tolerance = {report.tolerance!r}",
    ]
    for key, value in CONVENTIONS:
        lines.append(f"convention.{key} = {value}")
    lines.append(f"convention.base_point = xh={_fmt_vec(report.base_x_h)} xg={_fmt_vec(report.base_x_g)}")
    for r in report.records:
        lines.append(
            "record = "
            f"{r.index} | xh={_fmt_vec(r.x_h)} | xg={_fmt_vec(r.x_g)} | "
            f"lhs={_fmt_complex(r.report.lhs)} | rhs={_fmt_complex(r.report.rhs)} | "
            f"abs_error={r.report.abs_error!r} | termwise_max={r.report.termwise_max!r}"
        )
    lines.append(f"summary.pass_count = {report.pass_count}")
    lines.append(f"summary.total = {len(report.records)}")
    lines.append(f"summary.max_abs_error = {report.max_abs_error!r}")
    lines.append(f"summary.max_termwise = {report.max_termwise!r}")
    lines.append(f"status = {'PASS' if report.all_passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _emit_human(report: RunReport) -> str:
    rows = [
        f"scenario {report.scenario}: {report.samples} pairs, seed {report.seed}, "
        f"tolerance {report.tolerance:g}",
        f"{'pair':>5} {'abs error':>14} {'termwise max':>14} {'status':>8}",
    ]
    for r in report.records:
        rows.append(
            f"{r.index:>5} {r.report.abs_error:>14.3e} {r.report.termwise_max:>14.3e} "
            f"{'ok' if r.report.passed else 'FAIL':>8}"
        )
    rows.append(
        f"summary: {report.pass_count}/{len(report.records)} passed, "
        f"max abs error {report.max_abs_error:.3e}, status "
        f"{'PASS' if report.all_passed else 'FAIL'}"
    )
    return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class ParsedRecord:
    index: int
    x_h: tuple[float, ...]
    x_g: tuple[float, ...]
    lhs: complex
    rhs: complex
    abs_error: float
    termwise_max: float


def parse_machine_report(text: str) -> dict:
    """Round-trip parser for the machine format; numeric fields bit-exact."""
    out: dict = {"records": [], "conventions": {}}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, value = (p.strip() for p in line.split("=", 1))
        if key == "record":
            fields = [p.strip() for p in value.split("|")]
            index = int(fields[0])
            data = {}
            for f in fields[1:]:
                k, v = f.split("=", 1)
                data[k.strip()] = v.strip()
            xh = tuple(float(p) for p in data["xh"].split())
            xg = tuple(float(p) for p in data["xg"].split())
            lr, li = (float(p) for p in data["lhs"].split(","))
            rr, ri = (float(p) for p in data["rhs"].split(","))
            out["records"].append(
                ParsedRecord(
                    index,
                    xh,
                    xg,
                    complex(lr, li),
                    complex(rr, ri),
                    float(data["abs_error"]),
                    float(data["termwise_max"]),
                )
            )
        elif key.startswith("convention."):
            out["conventions"][key[len("convention."):]] = value
        else:
            out[key] = value
    return out
