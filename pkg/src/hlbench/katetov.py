"""Finite-scale checking of candidate morphisms between ideal presentations.

A presentation fixes a finite ground set, a list of named generators, and a
parameter-stamped membership surrogate.  A morphism f from presentation I
(on X) to presentation J (on Y) is a total map Y -> X; the checker pulls
every generator of I back through f and asks J's surrogate whether the
preimage is small.  Every verdict is about the surrogate at its stated
parameters and nothing more; reports say so verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import MorphismDomainError, NotFoundError, ParseError, RangeError, ShapeError
from .treecore import format_node, is_node, lenlex_key, level_nodes, parse_node

SCOPE_SENTENCE = (
    "This verdict certifies only the finite-scale surrogate statement at the "
    "stated parameters; it is not a statement about the infinite ideals."
)

GROUND_KINDS = ("interval", "grid", "nodes")
NODES_GROUND_MAX = 16


# ---------------------------------------------------------------------------
# grounds and presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ground:
    kind: str  # interval [0,N) | grid [0,N)^2 | nodes 2^{<D}
    size: int

    def __post_init__(self):
        if self.kind not in GROUND_KINDS:
            raise ValueError(f"ground kind must be one of {GROUND_KINDS}, got {self.kind!r}")
        if self.size < 1:
            raise RangeError(f"ground size {self.size} must be >= 1")
        if self.kind == "nodes" and self.size > NODES_GROUND_MAX:
            raise RangeError(f"nodes ground depth {self.size} exceeds cap {NODES_GROUND_MAX}")

    def members(self) -> Iterator:
        if self.kind == "interval":
            yield from range(self.size)
        elif self.kind == "grid":
            for col in range(self.size):
                for row in range(self.size):
                    yield (col, row)
        else:
            for n in range(self.size):
                yield from level_nodes(n)

    def __contains__(self, el) -> bool:
        if self.kind == "interval":
            return isinstance(el, int) and 0 <= el < self.size
        if self.kind == "grid":
            return (
                isinstance(el, tuple)
                and len(el) == 2
                and all(isinstance(x, int) and 0 <= x < self.size for x in el)
            )
        return is_node(el) and len(el) < self.size

    def parse_element(self, text: str):
        try:
            if self.kind == "interval":
                el = int(text)
            elif self.kind == "grid":
                col, _, row = text.partition(",")
                el = (int(col), int(row))
            else:
                el = parse_node(text)
        except ValueError:
            raise ValueError(f"bad {self.kind} element {text!r}") from None
        if el not in self:
            raise ValueError(f"element {text!r} outside the {self.kind} ground of size {self.size}")
        return el

    def format_element(self, el) -> str:
        if self.kind == "interval":
            return str(el)
        if self.kind == "grid":
            return f"{el[0]},{el[1]}"
        return format_node(el)


@dataclass(frozen=True)
class Generator:
    name: str
    elements: frozenset


@dataclass(frozen=True)
class FiniteIdealPresentation:
    name: str
    ground: Ground
    generators: tuple[Generator, ...]
    surrogate: "Surrogate | None" = None

    def __post_init__(self):
        for gen in self.generators:
            for el in gen.elements:
                if el not in self.ground:
                    raise RangeError(
                        f"generator {gen.name!r} has element outside the ground: "
                        f"{self.ground.format_element(el) if el in self.ground else el!r}"
                    )


# ---------------------------------------------------------------------------
# surrogates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurrogateVerdict:
    ok: bool
    measure: str


class Surrogate:
    """Named membership predicate with explicit parameters."""

    name = "surrogate"

    def parameters(self) -> dict[str, str]:
        raise NotImplementedError

    def accepts(self, elements: frozenset, presentation: FiniteIdealPresentation) -> SurrogateVerdict:
        raise NotImplementedError

    def stamp(self) -> str:
        params = " ".join(f"{k}={v}" for k, v in sorted(self.parameters().items()))
        return f"{self.name} {params}" if params else self.name


@dataclass(frozen=True)
class DensityWindowSurrogate(Surrogate):
    """Every dyadic window [2^n, 2^(n+1)) with n >= floor has density <= eps."""

    name = "dyadic-density"
    eps: Fraction = Fraction(1, 8)
    floor: int = 0

    def parameters(self) -> dict[str, str]:
        return {"eps": str(self.eps), "floor": str(self.floor)}

    def accepts(self, elements, presentation):
        if presentation.ground.kind != "interval":
            raise ShapeError("dyadic-density surrogate needs an interval ground")
        bound = presentation.ground.size
        worst = Fraction(0)
        worst_window = -1
        n = 0
        while (1 << (n + 1)) <= bound:
            if n >= self.floor:
                hits = sum(1 for m in elements if (1 << n) <= m < (1 << (n + 1)))
                density = Fraction(hits, 1 << n)
                if density > worst:
                    worst, worst_window = density, n
            n += 1
        if worst_window < 0:
            return SurrogateVerdict(True, "no constrained window")
        return SurrogateVerdict(worst <= self.eps, f"max density {worst} at window {worst_window}")


@dataclass(frozen=True)
class ColumnBoundSurrogate(Surrogate):
    """Per-column count <= per_column except in at most `exceptional` columns."""

    name = "column-bound"
    per_column: int = 1
    exceptional: int = 0

    def parameters(self) -> dict[str, str]:
        return {"per_column": str(self.per_column), "exceptional": str(self.exceptional)}

    def accepts(self, elements, presentation):
        if presentation.ground.kind != "grid":
            raise ShapeError("column-bound surrogate needs a grid ground")
        counts: dict[int, int] = {}
        for col, _row in elements:
            counts[col] = counts.get(col, 0) + 1
        over = sum(1 for v in counts.values() if v > self.per_column)
        peak = max(counts.values(), default=0)
        return SurrogateVerdict(
            over <= self.exceptional, f"{over} column(s) above {self.per_column}, peak {peak}"
        )


@dataclass(frozen=True)
class GeneratorUnionSurrogate(Surrogate):
    """Membership = covered by a union of at most max_generators listed generators."""

    name = "generator-union"
    max_generators: int = 1

    def parameters(self) -> dict[str, str]:
        return {"max": str(self.max_generators)}

    def accepts(self, elements, presentation):
        gens = [g.elements for g in presentation.generators]

        def cover(rest: frozenset, allowance: int) -> bool:
            if not rest:
                return True
            if allowance == 0:
                return False
            pivot = min(rest) if presentation.ground.kind != "nodes" else min(rest, key=lenlex_key)
            for g in gens:
                if pivot in g and cover(rest - g, allowance - 1):
                    return True
            return False

        needed = None
        for j in range(0, self.max_generators + 1):
            if cover(frozenset(elements), j):
                needed = j
                break
        if needed is None:
            return SurrogateVerdict(False, f"not covered by any {self.max_generators} generator(s)")
        return SurrogateVerdict(True, f"covered by {needed} generator(s)")


@dataclass(frozen=True)
class SummableBoundSurrogate(Surrogate):
    """Total weight sum(1/(n+1)) at most max_weight."""

    name = "summable-bound"
    max_weight: Fraction = Fraction(1)

    def parameters(self) -> dict[str, str]:
        return {"weight": str(self.max_weight)}

    def accepts(self, elements, presentation):
        if presentation.ground.kind != "interval":
            raise ShapeError("summable-bound surrogate needs an interval ground")
        weight = sum((Fraction(1, n + 1) for n in elements), Fraction(0))
        return SurrogateVerdict(weight <= self.max_weight, f"weight {weight}")


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

FORMULAS = ("identity", "column-projection")


@dataclass(frozen=True)
class MorphismSpec:
    """Total map from the target presentation's ground into the source's."""

    formula: str | None = None
    table: dict | None = None

    def __post_init__(self):
        if (self.formula is None) == (self.table is None):
            raise ValueError("exactly one of formula/table must be given")
        if self.formula is not None and self.formula not in FORMULAS:
            raise NotFoundError(f"unknown morphism formula {self.formula!r} (have {FORMULAS})")

    def apply(self, y):
        if self.formula == "identity":
            return y
        if self.formula == "column-projection":
            return y[0]
        try:
            return self.table[y]
        except KeyError:
            raise MorphismDomainError(f"morphism undefined at {y!r}") from None


def _check_total(f: MorphismSpec, source: FiniteIdealPresentation, target: FiniteIdealPresentation) -> None:
    src, tgt = source.ground, target.ground
    if f.formula == "identity":
        if (src.kind, src.size) != (tgt.kind, tgt.size):
            raise ShapeError(
                f"identity needs equal grounds, got {tgt.kind}/{tgt.size} -> {src.kind}/{src.size}"
            )
        return
    if f.formula == "column-projection":
        if tgt.kind != "grid" or src.kind != "interval" or tgt.size != src.size:
            raise ShapeError(
                f"column-projection needs grid/N -> interval/N, got {tgt.kind}/{tgt.size} -> {src.kind}/{src.size}"
            )
        return
    assert f.table is not None
    missing = [y for y in tgt.members() if y not in f.table]
    if missing:
        raise MorphismDomainError(
            f"morphism undefined at {tgt.format_element(missing[0])} "
            f"({len(missing)} missing element(s) of the target ground)"
        )
    for y, x in f.table.items():
        if y not in tgt:
            raise MorphismDomainError(f"table key {y!r} outside the target ground")
        if x not in src:
            raise MorphismDomainError(f"f({tgt.format_element(y)}) = {x!r} lands outside the source ground")


# ---------------------------------------------------------------------------
# checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorCheck:
    generator: str
    ok: bool
    measure: str


@dataclass(frozen=True)
class MorphismReport:
    passed: bool
    source: str
    target: str
    surrogate: str
    parameters: dict[str, str]
    checks: tuple[GeneratorCheck, ...]
    scope: str = SCOPE_SENTENCE

    @property
    def violations(self) -> tuple[GeneratorCheck, ...]:
        return tuple(ch for ch in self.checks if not ch.ok)


def check_morphism(
    f: MorphismSpec, source: FiniteIdealPresentation, target: FiniteIdealPresentation
) -> MorphismReport:
    """Pull every source generator back through f and ask the target surrogate.

    The report lists one check per generator in presentation order; it
    certifies (or refutes) only the surrogate statement at its parameters.
    """
    if target.surrogate is None:
        raise ValueError(f"target presentation {target.name!r} has no membership surrogate")
    _check_total(f, source, target)
    members = list(target.ground.members())
    checks: list[GeneratorCheck] = []
    for gen in source.generators:
        preimage = frozenset(y for y in members if f.apply(y) in gen.elements)
        verdict = target.surrogate.accepts(preimage, target)
        checks.append(GeneratorCheck(gen.name, verdict.ok, verdict.measure))
    return MorphismReport(
        passed=all(ch.ok for ch in checks),
        source=source.name,
        target=target.name,
        surrogate=target.surrogate.name,
        parameters=target.surrogate.parameters(),
        checks=tuple(checks),
    )


# ---------------------------------------------------------------------------
# builtin witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BuiltinWitness:
    name: str
    morphism: MorphismSpec
    source: FiniteIdealPresentation
    target: FiniteIdealPresentation
    note: str


def _fin_presentation(bound: int, first: int, surrogate: Surrogate | None) -> FiniteIdealPresentation:
    gens = tuple(Generator(f"{{{m}}}", frozenset({m})) for m in range(first, bound))
    return FiniteIdealPresentation("fin", Ground("interval", bound), gens, surrogate)


def _builtin_fin_to_z() -> BuiltinWitness:
    # Singletons {m}, m >= 8, each confined to one dyadic window of density
    # 2^-floor(log2 m) <= 1/8; the identity pulls them back unchanged.
    bound = 128
    surrogate = DensityWindowSurrogate(eps=Fraction(1, 8), floor=0)
    source = _fin_presentation(bound, 8, None)
    target = FiniteIdealPresentation(
        "density-zero", Ground("interval", bound), source.generators, surrogate
    )
    return BuiltinWitness(
        "fin_to_z_identity",
        MorphismSpec(formula="identity"),
        source,
        target,
        "identity on [0,128); generators are the singletons {8}..{127}",
    )


def _builtin_summable_to_z() -> BuiltinWitness:
    bound = 256
    squares = frozenset(k * k for k in range(1, 16) if k * k < bound)
    pow2 = frozenset(1 << k for k in range(8))
    factorials = frozenset(x for x in (1, 2, 6, 24, 120) if x < bound)
    gens = (
        Generator("squares", squares),
        Generator("pow2", pow2),
        Generator("factorials", factorials),
    )
    source = FiniteIdealPresentation("summable", Ground("interval", bound), gens, None)
    target = FiniteIdealPresentation(
        "density-zero",
        Ground("interval", bound),
        gens,
        DensityWindowSurrogate(eps=Fraction(1, 4), floor=4),
    )
    return BuiltinWitness(
        "summable_to_z_identity",
        MorphismSpec(formula="identity"),
        source,
        target,
        "identity on [0,256); sparse summable generator samples have window density <= 1/4 past window 4",
    )


def _builtin_ed_to_finxfin() -> BuiltinWitness:
    size = 32
    col3 = frozenset((3, r) for r in range(size))
    col17 = frozenset((17, r) for r in range(size))
    diag = frozenset((x, x) for x in range(size))
    double = frozenset((x, (2 * x) % size) for x in range(size))
    gens = (
        Generator("col3", col3),
        Generator("col17", col17),
        Generator("diag", diag),
        Generator("double", double),
    )
    source = FiniteIdealPresentation("ed", Ground("grid", size), gens, None)
    target = FiniteIdealPresentation(
        "finxfin",
        Ground("grid", size),
        gens,
        ColumnBoundSurrogate(per_column=1, exceptional=1),
    )
    return BuiltinWitness(
        "ed_to_finxfin_identity",
        MorphismSpec(formula="identity"),
        source,
        target,
        "identity on [0,32)^2; a column generator exceeds the bound in one column, graphs in none",
    )


def _builtin_fin_to_finxfin() -> BuiltinWitness:
    size = 32
    gens = tuple(Generator(f"{{{m}}}", frozenset({m})) for m in range(size))
    source = FiniteIdealPresentation("fin", Ground("interval", size), gens, None)
    target = FiniteIdealPresentation(
        "finxfin",
        Ground("grid", size),
        (),
        ColumnBoundSurrogate(per_column=0, exceptional=1),
    )
    return BuiltinWitness(
        "fin_to_finxfin_projection",
        MorphismSpec(formula="column-projection"),
        source,
        target,
        "column projection [0,32)^2 -> [0,32); a singleton pulls back to one full column",
    )


_BUILTINS = {
    "fin_to_z_identity": _builtin_fin_to_z,
    "summable_to_z_identity": _builtin_summable_to_z,
    "ed_to_finxfin_identity": _builtin_ed_to_finxfin,
    "fin_to_finxfin_projection": _builtin_fin_to_finxfin,
}


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


def builtin_witness(name: str) -> BuiltinWitness:
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise NotFoundError(f"unknown builtin {name!r} (have {builtin_names()})") from None
    return factory()


def counterexample_witness(name: str = "fin_to_z_one_point") -> BuiltinWitness:
    """One-point mutation of fin_to_z_identity that the checker must reject.

    The table is the identity on [0,128) except f(1) = 64.  The preimage of
    the generator {64} becomes {1, 64}, and 1 sits alone in the dyadic window
    [1,2) with density 1 > 1/8, so the check fails naming {64}.
    """
    if name != "fin_to_z_one_point":
        raise NotFoundError(f"unknown counterexample {name!r} (have ('fin_to_z_one_point',))")
    base = _builtin_fin_to_z()
    table = {y: y for y in range(128)}
    table[1] = 64
    return BuiltinWitness(
        "fin_to_z_one_point",
        MorphismSpec(table=table),
        base.source,
        base.target,
        "identity on [0,128) mutated at the single point f(1)=64; fails on generator {64}",
    )


def counterexample_names() -> tuple[str, ...]:
    return ("fin_to_z_one_point",)


# ---------------------------------------------------------------------------
# text formats
# ---------------------------------------------------------------------------


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad fraction {text!r}") from None


def _parse_surrogate(tokens: list[str], line: int) -> Surrogate:
    if not tokens:
        raise ParseError("surrogate line needs a name", line)
    name, *rest = tokens
    params: dict[str, str] = {}
    for piece in rest:
        key, eq, val = piece.partition("=")
        if not eq or not key:
            raise ParseError(f"bad surrogate parameter {piece!r}", line)
        params[key] = val
    surrogate: Surrogate | None = None
    try:
        if name == "dyadic-density":
            surrogate = DensityWindowSurrogate(
                eps=_parse_fraction(params.pop("eps", "1/8")), floor=int(params.pop("floor", "0"))
            )
        elif name == "column-bound":
            surrogate = ColumnBoundSurrogate(
                per_column=int(params.pop("per_column", "1")),
                exceptional=int(params.pop("exceptional", "0")),
            )
        elif name == "generator-union":
            surrogate = GeneratorUnionSurrogate(max_generators=int(params.pop("max", "1")))
        elif name == "summable-bound":
            surrogate = SummableBoundSurrogate(max_weight=_parse_fraction(params.pop("weight", "1")))
    except ValueError as exc:
        raise ParseError(str(exc), line) from None
    if surrogate is None:
        raise ParseError(f"unknown surrogate {name!r}", line)
    if params:
        raise ParseError(f"unknown surrogate parameter(s) {sorted(params)}", line)
    return surrogate


def parse_ideal_text(text: str) -> FiniteIdealPresentation:
    """Parse: `ideal v1 ground=<kind> params=<size>` then name/surrogate/generator lines."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input", 1)
    head = lines[0].split()
    if (
        len(head) != 4
        or head[0] != "ideal"
        or head[1] != "v1"
        or not head[2].startswith("ground=")
        or not head[3].startswith("params=")
    ):
        raise ParseError(f"expected header 'ideal v1 ground=<kind> params=<size>', got {lines[0]!r}", 1)
    kind = head[2][len("ground=") :]
    try:
        size = int(head[3][len("params=") :])
        ground = Ground(kind, size)
    except (ValueError, RangeError) as exc:
        raise ParseError(str(exc), 1) from None
    name = "ideal"
    surrogate: Surrogate | None = None
    generators: list[Generator] = []
    seen_names: set[str] = set()
    for i, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if tokens[0] == "name":
            if len(tokens) != 2:
                raise ParseError("name line needs exactly one value", i)
            name = tokens[1]
        elif tokens[0] == "surrogate":
            if surrogate is not None:
                raise ParseError("duplicate surrogate line", i)
            surrogate = _parse_surrogate(tokens[1:], i)
        elif tokens[0] == "generator":
            if len(tokens) < 2:
                raise ParseError("generator line needs a name", i)
            gen_name = tokens[1]
            if gen_name in seen_names:
                raise ParseError(f"duplicate generator {gen_name!r}", i)
            seen_names.add(gen_name)
            try:
                elements = frozenset(ground.parse_element(tok) for tok in tokens[2:])
            except ValueError as exc:
                raise ParseError(str(exc), i) from None
            generators.append(Generator(gen_name, elements))
        else:
            raise ParseError(f"unknown directive {tokens[0]!r}", i)
    return FiniteIdealPresentation(name, ground, tuple(generators), surrogate)


def ideal_to_text(p: FiniteIdealPresentation) -> str:
    lines = [f"ideal v1 ground={p.ground.kind} params={p.ground.size}", f"name {p.name}"]
    if p.surrogate is not None:
        lines.append(f"surrogate {p.surrogate.stamp()}")
    for gen in p.generators:
        sort_key = lenlex_key if p.ground.kind == "nodes" else None
        elements = " ".join(p.ground.format_element(el) for el in sorted(gen.elements, key=sort_key))
        lines.append(f"generator {gen.name} {elements}".rstrip())
    return "\n".join(lines) + "\n"


def parse_morphism_text(text: str, domain: Ground, codomain: Ground) -> MorphismSpec:
    """Parse: `morphism v1` then `formula=<name>` or `y -> x` lines."""
    lines = text.splitlines()
    if not lines or lines[0].split() != ["morphism", "v1"]:
        raise ParseError("expected header 'morphism v1'", 1)
    formula: str | None = None
    table: dict = {}
    for i, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("formula="):
            if formula is not None or table:
                raise ParseError("formula line must be the only content", i)
            formula = stripped[len("formula=") :]
            if formula not in FORMULAS:
                raise ParseError(f"unknown formula {formula!r} (have {FORMULAS})", i)
            continue
        if formula is not None:
            raise ParseError("table lines cannot follow a formula line", i)
        left, sep, right = stripped.partition("->")
        if not sep:
            raise ParseError(f"expected '<y> -> <x>', got {stripped!r}", i)
        try:
            y = domain.parse_element(left.strip())
            x = codomain.parse_element(right.strip())
        except ValueError as exc:
            raise ParseError(str(exc), i) from None
        if y in table:
            raise ParseError(f"duplicate table entry for {left.strip()!r}", i)
        table[y] = x
    if formula is not None:
        return MorphismSpec(formula=formula)
    if not table:
        raise ParseError("morphism has neither formula nor table", 1)
    return MorphismSpec(table=table)


def morphism_to_text(f: MorphismSpec, domain: Ground, codomain: Ground) -> str:
    lines = ["morphism v1"]
    if f.formula is not None:
        lines.append(f"formula={f.formula}")
    else:
        assert f.table is not None
        def key(item):
            y, _ = item
            if domain.kind == "nodes":
                return lenlex_key(y)
            return y
        for y, x in sorted(f.table.items(), key=key):
            lines.append(f"{domain.format_element(y)} -> {codomain.format_element(x)}")
    return "\n".join(lines) + "\n"


def report_to_json(report: MorphismReport) -> dict:
    return {
        "pass": report.passed,
        "source": report.source,
        "target": report.target,
        "surrogate": report.surrogate,
        "parameters": dict(report.parameters),
        "checked": len(report.checks),
        "checks": [
            {"generator": ch.generator, "ok": ch.ok, "measure": ch.measure} for ch in report.checks
        ],
        "violations": [
            {"generator": ch.generator, "measure": ch.measure} for ch in report.violations
        ],
        "scope": report.scope,
    }
