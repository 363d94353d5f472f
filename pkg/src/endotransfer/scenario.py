"""Scenario files: a line-oriented `key = value` format with [sections].

A scenario fixes the ambient Cartan type, the real form gradings for both
groups, the order-2 character cutting out the endoscopic group, a base
point with an identity diagram, and optional extra real-Weyl generators.
Parsing reports every violation with its line number and the name of the
violated invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from .distributions import EllipticScenario, make_scenario
from .endoscopy import (
    ADatum,
    EllipticElement,
    EndoscopyError,
    TransferFactorEngine,
    build_endoscopic_datum,
)
from .realform import GradingError, build_grading, parse_grade, real_weyl_group
from .rootdata import RootDatum, RootDatumError, build_root_datum


class ScenarioError(ValueError):
    def __init__(self, problems: list[tuple[int, str]]):
        self.problems = problems
        lines = "; ".join(f"line {n}: {msg}" for n, msg in problems)
        super().__init__(lines)


@dataclass
class Scenario:
    name: str
    g_type: str
    form_scale: Fraction
    grading_g: list[int]
    s_character: list[int]
    grading_h: list[int]
    base_x_h: tuple[Fraction, ...]
    base_x_g: tuple[Fraction, ...]
    extras_g: list[tuple[int, ...]] = field(default_factory=list)
    extras_h: list[tuple[int, ...]] = field(default_factory=list)


def _parse_vector(text: str) -> tuple[Fraction, ...]:
    items = [p for chunk in text.split(",") for p in chunk.split()]
    return tuple(Fraction(p) for p in items)


def _parse_words(text: str) -> list[tuple[int, ...]]:
    words = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        words.append(tuple(int(p) - 1 for p in chunk.split()))
    return words


def parse_scenario(text: str) -> Scenario:
    problems: list[tuple[int, str]] = []
    section = ""
    top: dict[str, tuple[int, str]] = {}
    sections: dict[str, dict[str, tuple[int, str]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            sections.setdefault(section, {})
            continue
        if "=" not in line:
            problems.append((lineno, f"expected 'key = value', got {line!r}"))
            continue
        key, value = (p.strip() for p in line.split("=", 1))
        store = sections.setdefault(section, {}) if section else top
        if key in store:
            problems.append((lineno, f"duplicate key {key!r}"))
        store[key] = (lineno, value)

    def need(store, key, where):
        if key not in store:
            problems.append((0, f"missing key {key!r} in {where}"))
            return None
        return store[key]

    name = top.get("name", (0, "unnamed"))[1]
    g_entry = need(top, "g_type", "the top section")
    g_type = g_entry[1] if g_entry else "A1"
    form_scale = Fraction(1)
    if "form_scale" in top:
        lineno, value = top["form_scale"]
        try:
            form_scale = Fraction(value)
            if form_scale <= 0:
                problems.append((lineno, "form_scale must be positive"))
        except ValueError:
            problems.append((lineno, f"bad rational {value!r}"))

    def parse_graded(section_name) -> list[int]:
        out = []
        store = sections.get(section_name, {})
        for idx in range(1, len(store) + 1):
            key = f"alpha{idx}"
            if key not in store:
                problems.append((0, f"missing {key!r} in [{section_name}]"))
                return out
            lineno, value = store[key]
            try:
                out.append(parse_grade(value))
            except GradingError as e:
                problems.append((lineno, str(e)))
        return out

    grading_g = parse_graded("grading_g")
    grading_h = parse_graded("grading_h")

    s_character = []
    for idx in range(1, len(sections.get("s_character", {})) + 1):
        key = f"alpha{idx}"
        store = sections.get("s_character", {})
        if key not in store:
            problems.append((0, f"missing {key!r} in [s_character]"))
            break
        lineno, value = store[key]
        if value not in ("1", "+1", "-1"):
            problems.append((lineno, f"character sign must be +1 or -1, got {value!r}"))
        else:
            s_character.append(1 if value in ("1", "+1") else -1)

    base = sections.get("base_point", {})
    base_x_h: tuple[Fraction, ...] = ()
    base_x_g: tuple[Fraction, ...] = ()
    for key in ("x_h", "x_g"):
        entry = need(base, key, "[base_point]")
        if entry:
            lineno, value = entry
            try:
                vec = _parse_vector(value)
            except ValueError:
                problems.append((lineno, f"bad rational vector {value!r}"))
                continue
            if key == "x_h":
                base_x_h = vec
            else:
                base_x_g = vec

    extras = sections.get("real_weyl_extras", {})
    extras_g = _parse_words(extras.get("g", (0, ""))[1])
    extras_h = _parse_words(extras.get("h", (0, ""))[1])

    if problems:
        raise ScenarioError(problems)
    return Scenario(
        name=name,
        g_type=g_type,
        form_scale=form_scale,
        grading_g=grading_g,
        s_character=s_character,
        grading_h=grading_h,
        base_x_h=base_x_h,
        base_x_g=base_x_g,
        extras_g=extras_g,
        extras_h=extras_h,
    )


def build_scenario(config: Scenario, base_value: complex = 1.0) -> EllipticScenario:
    """Assemble and validate the full verification scenario."""
    problems: list[tuple[int, str]] = []
    try:
        g_datum = build_root_datum(config.g_type)
    except RootDatumError as e:
        raise ScenarioError([(0, f"g_type: {e}")])

    if len(config.grading_g) != len(g_datum.simple_roots):
        problems.append((0, "grading_g does not match the number of simple roots"))
    if len(config.s_character) != len(g_datum.simple_roots):
        problems.append((0, "s_character does not match the number of simple roots"))
    if problems:
        raise ScenarioError(problems)

    grading_g = build_grading(g_datum, config.grading_g)
    datum = build_endoscopic_datum(g_datum, config.s_character)
    if not datum.elliptic:
        raise ScenarioError([(0, "violated invariant: ellipticity of the endoscopic datum")])

    n_h_simple = len(datum.h_datum.simple_roots)
    if len(config.grading_h) != n_h_simple:
        raise ScenarioError(
            [(0, f"grading_h needs {n_h_simple} entries for the derived endoscopic simple roots")]
        )
    grading_h = build_grading(datum.h_datum, config.grading_h)

    try:
        extras_g = tuple(g_datum.element_from_word(word) for word in config.extras_g)
        extras_h = tuple(datum.h_datum.element_from_word(word) for word in config.extras_h)
        rw_g = real_weyl_group(grading_g, extras_g)
        rw_h = real_weyl_group(grading_h, extras_h)
    except (GradingError, RootDatumError) as e:
        raise ScenarioError([(0, f"real Weyl group: {e}")])

    if len(config.base_x_h) != g_datum.rank or len(config.base_x_g) != g_datum.rank:
        raise ScenarioError([(0, "base_point vectors must have length equal to the rank")])
    base_x_h = EllipticElement(tuple(config.base_x_h), "H")
    base_x_g = EllipticElement(tuple(config.base_x_g), "G")
    try:
        engine = TransferFactorEngine(
            datum,
            grading_g,
            grading_h,
            rw_g,
            rw_h,
            base_x_h,
            base_x_g,
            base_value=base_value,
        )
    except EndoscopyError as e:
        raise ScenarioError([(0, f"violated invariant: regularity/base diagram: {e}")])

    return make_scenario(config.name, engine, config.form_scale)


def load_scenario_file(path, base_value: complex = 1.0) -> EllipticScenario:
    with open(path, "r", encoding="utf-8") as fh:
        return build_scenario(parse_scenario(fh.read()), base_value=base_value)


def builtin_scenario_path(name: str):
    from importlib.resources import files

    return files("endotransfer").joinpath("scenarios", f"{name}.scn")


def load_builtin(name: str, base_value: complex = 1.0) -> EllipticScenario:
    text = builtin_scenario_path(name).read_text(encoding="utf-8")
    return build_scenario(parse_scenario(text), base_value=base_value)
