"""
Scenario commands: each drives core operations and returns a JSON-ready result.

A task passes when every key of its ``expect`` block matches the result, or,
without ``expect``, when the command's own verdict holds. Errors become
``{"error": {"code", "message"}}`` entries; usage errors abort the run.
"""
import dataclasses
import json
import logging
import random
import typing as t

from sympy.polys.domains import QQ
from slugify import slugify

from genkahler.config import JACOBIAN_MAX_DEGREE, Verdict
from genkahler.core import deform, gcs, spinor, submanifold, tensorcalc
from genkahler.core.coeffring import (
    complex_coordinates,
    make_ring,
    point_from_complex,
    random_point,
    rational,
    spatial_degree,
)
from genkahler.core.errors import DegreeBoundError, GenKahlerError, UndecidedError, UsageError
from genkahler.core.models import GaussRatModel, Report, RunSettings, SampleDiagnostics, Scenario, TaskResult
from genkahler.cli.parser import NAME_RE, Value, format_expr, format_scalar, parse_expr

# Set up logging
logger = logging.getLogger(__name__)

Result = t.Tuple[t.Dict[str, t.Any], bool]

NAMED_STRUCTURES = {"J_J": {"kind": "complex"}, "J_omega": {"kind": "symplectic"}, "J_beta_t": {"kind": "beta"}}


class ScenarioContext:
    """Parsed objects, submanifold models and settings shared by the tasks of a run."""

    def __init__(self, scenario: Scenario, settings: RunSettings):
        self.scenario = scenario
        self.settings = settings
        self.n = scenario.n
        self._models: t.Dict[str, submanifold.SubmanifoldModel] = {}

    @property
    def t_value(self):
        return rational(self.settings.t_value)

    def rng(self, index: int) -> random.Random:
        """Generator for one task, seeded from the run seed and the task index."""
        return random.Random(self.settings.seed * 100003 + index)

    def obj(self, ref: t.Any, kind: str) -> Value:
        """A named object, or ``ref`` itself parsed as an expression."""
        if not isinstance(ref, str):
            raise UsageError(f"expected an expression or object name, got {ref!r}")
        text = self.scenario.objects.get(ref, ref)
        return parse_expr(text, self.n, kind)

    def model(self, name: str) -> submanifold.SubmanifoldModel:
        if name not in self._models:
            spec = self.scenario.ideals.get(name)
            if spec is None:
                raise UsageError(f"unknown ideal {name!r}")
            graph = {}
            for coord, expr in spec.parametrization.items():
                match = NAME_RE.match(coord)
                if not match or match.group(1) != "z":
                    raise UsageError(f"parametrization key must be a coordinate z<k>, got {coord!r}")
                graph[int(match.group(2)) - 1] = parse_expr(expr, self.n, "scalar")
            self._models[name] = submanifold.SubmanifoldModel.from_generators(
                [parse_expr(g, self.n, "scalar") for g in spec.generators],
                codim=spec.codim,
                samples=[point_from_complex([c.to_gauss() for c in point]) for point in spec.samples],
                graph=graph or None,
                name=name,
            )
        return self._models[name]

    def model_points(self, model: submanifold.SubmanifoldModel, rng: random.Random) -> t.List[t.Tuple]:
        if model.is_complex():
            return model.ensure_samples(self.settings.samples, rng)
        if not model.samples:
            raise UsageError(f"{model.name} needs explicit samples")
        return model.samples[:self.settings.samples]

    def ambient_points(self, rng: random.Random) -> t.List[t.Tuple]:
        return [random_point(self.n, rng) for _ in range(self.settings.samples)]

    def structure(self, spec: t.Any, points: t.Sequence, t_value: t.Any = None):
        """GCStructure or PointwiseStructure from a structure spec.

        A spec is "J_J", "J_omega", "J_beta_t" (using the objects omega and beta)
        or a dict {"kind": complex|symplectic|beta|spinor|deformed, ...}, with an
        optional closed real 2-form "b" applied as a b-field transform.
        """
        if isinstance(spec, str):
            spec = NAMED_STRUCTURES.get(spec)
            if spec is None:
                raise UsageError("structure must be J_J, J_omega, J_beta_t or a dict")
        kind = spec.get("kind")
        if kind == "complex":
            J = gcs.make_JJ(make_ring(self.n))
        elif kind == "symplectic":
            J = gcs.make_Jomega(self.obj(spec.get("omega", "omega"), "form"))
        elif kind == "beta":
            J = gcs.make_J_beta_t(self.obj(spec.get("beta", "beta"), "polyvector"), check=spec.get("check", True))
        elif kind == "spinor":
            return spinor.induced_Jpsi(self.obj(spec.get("psi", "psi"), "form"), points, t_value)
        elif kind == "deformed":
            series = self.series(spec)
            return spinor.induced_Jpsi(spinor.deformed_spinor(series, t_value), points)
        else:
            raise UsageError(f"unknown structure kind {kind!r}")
        if "b" in spec:
            J = gcs.b_field_transform(J, self.obj(spec["b"], "form"))
        return J

    def series(self, args: t.Dict[str, t.Any]) -> deform.DeformationSeries:
        shift = self.obj(args["shift"], "form") if "shift" in args else None
        return deform.solve_deformation(
            self.obj(args.get("beta", "beta"), "polyvector"),
            self.obj(args.get("omega", "omega"), "form"),
            int(args.get("order", self.settings.order)),
            shift=shift,
            degree_bound=args.get("degree_bound", self.settings.degree_bound),
        )


def _diagnostics(points: t.Sequence, **values: t.Sequence) -> t.List[t.Dict[str, t.Any]]:
    """Per-sample entries {"point": complex coordinates, "values": {name: value}}."""
    return [
        SampleDiagnostics(
            point=[GaussRatModel.from_gauss(c) for c in complex_coordinates(x)],
            values={name: series[i] for name, series in values.items()},
        ).model_dump()
        for i, x in enumerate(points)
    ]


def _t_arg(ctx: ScenarioContext, args: t.Dict[str, t.Any]):
    return rational(str(args["t"])) if "t" in args else ctx.t_value


# ---------- commands ----------------------------------------------------------

def cmd_check_poisson(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    """[beta, beta] = 0 for beta given directly, as beta_f, or as a wedge of fields."""
    if "f" in args:
        beta = tensorcalc.beta_f(ctx.obj(args["f"], "scalar"))
    elif "fields" in args:
        fields = [ctx.obj(v, "polyvector") for v in args["fields"]]
        coefficients = None
        if "coefficients" in args:
            coefficients = {
                tuple(int(k) - 1 for k in key.split(",")): rational(str(value))
                for key, value in args["coefficients"].items()
            }
        beta = tensorcalc.wedge_of_fields(fields, coefficients)
    else:
        beta = ctx.obj(args.get("beta", "beta"), "polyvector")
    square = tensorcalc.schouten(beta, beta)
    poisson = tensorcalc.is_poisson(beta)
    result = {"poisson": poisson, "schouten": format_expr(square), "beta": format_expr(beta)}
    if "bracket" in args:
        f, g = (ctx.obj(e, "scalar") for e in args["bracket"])
        result["poisson_bracket"] = format_scalar(tensorcalc.poisson_bracket(beta, f, g))
    return result, poisson


def cmd_poisson_sub(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    beta = ctx.obj(args.get("beta", "beta"), "polyvector")
    model = ctx.model(args.get("ideal", "M"))
    holds = submanifold.is_poisson_submanifold(beta, model)
    result: t.Dict[str, t.Any] = {"poisson_submanifold": holds}
    if model.graph:
        beta_M, nontrivial = submanifold.induced_poisson(beta, model)
        result["induced"] = format_expr(beta_M)
        result["induced_nontrivial"] = nontrivial
    if "fields" in args:
        fields = [ctx.obj(v, "polyvector") for v in args["fields"]]
        result["group_invariant"] = submanifold.group_invariant_ideal_check(fields, model.ideal)
    return result, holds


def cmd_conormal_invariant(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    """N*M is J_beta_t-invariant at every sample for each listed t."""
    J = gcs.make_J_beta_t(ctx.obj(args.get("beta", "beta"), "polyvector"))
    model = ctx.model(args.get("ideal", "M"))
    points = ctx.model_points(model, rng)
    t_values = [str(v) for v in args.get("t", [ctx.settings.t_value])]
    invariant = {v: submanifold.is_conormal_invariant(J, model, points, rational(v)) for v in t_values}
    ranks = [len(submanifold.conormal_frame(model, x)) for x in points]
    return {"invariant": invariant, "conormal_rank": ranks, "samples": len(points)}, all(invariant.values())


def cmd_j_sub(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    model = ctx.model(args.get("ideal", "M"))
    points = ctx.model_points(model, rng)
    t_value = _t_arg(ctx, args)
    J = ctx.structure(args.get("structure", "J_beta_t"), ctx.ambient_points(rng), t_value)
    report = submanifold.is_J_submanifold(J, model, points, t_value)
    result = dataclasses.asdict(report)
    if report.holds:
        result["induced_types"] = [
            gcs.type_of_matrix(submanifold.induced_structure_at_point(J, model, x, t_value)) for x in points
        ]
    return result, report.holds


def cmd_gcs_type(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    """Type at sample points, integrability and, for beta, the formula n - 2 rank beta."""
    points = ctx.ambient_points(rng)
    t_value = _t_arg(ctx, args)
    J = ctx.structure(args.get("structure", "J_beta_t"), points, t_value)
    types = [gcs.type_at_point(J, x, t_value) for x in points]
    result: t.Dict[str, t.Any] = {"types": types, "samples": len(points)}
    result["per_sample"] = _diagnostics(points, type=types)
    ok = True
    if isinstance(J, gcs.GCStructure):
        result["almost_complex"] = J.is_almost_complex()
        result["orthogonal"] = J.is_orthogonal()
        if J.frame is not None:
            report = gcs.integrability_check(J, points, t_value)
            result["integrable"] = report.integrable
            result["symbolic"] = report.symbolic
            ok = report.integrable
        ok = ok and result["almost_complex"] and result["orthogonal"]
    if "beta" in args:
        beta = ctx.obj(args["beta"], "polyvector")
        expected = [ctx.n - 2 * gcs.poisson_rank_at_point(beta, x) for x in points]
        result["type_formula"] = expected == types
        ok = ok and result["type_formula"]
    return result, ok


def cmd_kahler_pair(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    points = ctx.ambient_points(rng)
    t_value = _t_arg(ctx, args)
    J0 = ctx.structure(args.get("J0", "J_beta_t"), points, t_value)
    J1 = ctx.structure(args.get("J1", {"kind": "deformed"}), points, t_value)
    report = gcs.kahler_pair_check(J0, J1, points, t_value)
    result: t.Dict[str, t.Any] = {
        "commuting": report.commuting,
        "positive": bool(report.positive_at) and all(report.positive_at),
        "symbolic": report.symbolic,
        "samples": len(points),
    }
    if report.valid and points:
        split = gcs.c_split(gcs.gen_metric(J0, J1), points[0], t_value)
        result["b_field"] = format_expr(split.b)
    if report.valid and "ideal" in args:
        model = ctx.model(args["ideal"])
        gammas = [submanifold.gamma_iso_check(J0, J1, model, x, t_value) for x in ctx.model_points(model, rng)]
        result["gamma_iso"] = all(g.holds for g in gammas)
    return result, report.valid and result.get("gamma_iso", True)


def cmd_spinor_pullback(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    """Pullback of psi_t to a complex submanifold is nonzero, pure and non-degenerate."""
    model = ctx.model(args.get("ideal", "M"))
    points = ctx.model_points(model, rng)
    t_value = _t_arg(ctx, args)
    psi = spinor.deformed_spinor(ctx.series(args), t_value)
    nonzero, pure, nondegenerate, types = True, True, True, []
    for x in points:
        phi = spinor.pullback_at_point(psi, model, x)
        origin = (QQ.zero,) * (2 * phi.n)
        if phi.is_zero():
            nonzero = pure = nondegenerate = False
            continue
        pure = pure and spinor.is_pure_at(phi, origin)
        nondegenerate = nondegenerate and spinor.is_nondegenerate(phi, [origin])
        types.append(spinor.type_of_spinor_at_point(phi, origin))
    result = {"nonzero": nonzero, "pure": pure, "nondegenerate": nondegenerate, "types": types, "samples": len(points)}
    return result, nonzero and pure and nondegenerate


def cmd_deform(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    series = ctx.series(args)
    omega = series.omega
    reached = deform.residual_zero_through(series)
    canonical = tensorcalc.canonical_form(omega.ring)
    result: t.Dict[str, t.Any] = {
        "order": series.order,
        "residual_zero_through": reached,
        "b_series": format_expr(series.b_form()),
        "k1_membership": all(deform.k1_membership(bk.h, bk.p, omega) for bk in series.b_coeffs),
        "canonical_preserved": all(bk.p.wedge(canonical).is_zero() for bk in series.b_coeffs),
    }
    checks = args.get("checks", [])
    if "bch" in checks:
        result["bch_consistent"] = deform.bch_consistency(series, rng)
    if "conjugation" in checks:
        result["conjugation_consistent"] = deform.conjugation_consistency(series)
    if "kahler" in checks:
        points = ctx.ambient_points(rng)
        t_value = _t_arg(ctx, args)
        J1 = spinor.induced_Jpsi(spinor.deformed_spinor(series, t_value), points)
        report = gcs.kahler_pair_check(gcs.make_J_beta_t(series.beta), J1, points, t_value)
        result["kahler_pair"] = report.valid
    ok = reached == series.order and result["k1_membership"] and result["canonical_preserved"]
    ok = ok and all(result.get(key, True) for key in ("bch_consistent", "conjugation_consistent", "kahler_pair"))
    return result, ok


def cmd_bihermitian(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    beta = ctx.obj(args.get("beta", "beta"), "polyvector")
    omega = ctx.obj(args.get("omega", "omega"), "form")
    ks = deform.ks_class(beta, omega)
    frames = deform.bihermitian_first_order(beta, omega)
    source = deform.first_order_source(beta, omega)
    closed = ks.delbar_closed(beta.ring)
    result = {
        "ks_class": {f"{j + 1},{l + 1}": format_scalar(c) for (j, l), c in sorted(ks.components.items())},
        "delbar_closed": closed,
        "frames_plus": [format_expr(z) for z in frames.plus],
        "frames_minus": [format_expr(z) for z in frames.minus],
        "frames_agree": all(c.is_zero() for c in frames.corrections),
        "b1": format_expr(frames.b1),
        "source_bidegrees": [f"{p},{q}" for p, q in deform.source_bidegrees(source, omega)],
        "source_in_k2": deform.k2_membership(source, omega),
    }
    return result, closed and result["source_in_k2"]


def cmd_obstruction_rank(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    """rank P <= 1 against [beta, beta] = 0, for one matrix or a random sweep."""
    if "random" in args:
        dims = args.get("dims", [2, 3, 4])
        trials = int(args["random"])
        disagreements = 0
        for k in range(trials):
            data = deform.ObstructionMatrix.random(dims[k % len(dims)], rng, rank_one=k % 2 == 1)
            if not deform.obstruction_rank_test(data).criterion_consistent:
                disagreements += 1
        return {"trials": trials, "disagreements": disagreements}, disagreements == 0
    P = [[rational(str(c)) for c in row] for row in args["P"]]
    n = len(P)
    lam = args.get("lambda") or [[0] * n for _ in range(n)]
    data = deform.ObstructionMatrix(P, [[rational(str(c)) for c in row] for row in lam])
    report = deform.obstruction_rank_test(data)
    result = {
        "rank": report.rank,
        "schouten_zero": report.schouten_zero,
        "criterion_consistent": report.criterion_consistent,
        "beta": format_expr(deform.build_torus_cp1_bivector(data)),
    }
    return result, report.criterion_consistent


def cmd_extends_projective(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    """Chart-by-chart extension test; for a Jacobian bivector beta_f it must agree with deg f <= 3."""
    result: t.Dict[str, t.Any] = {}
    f = None
    if "f" in args:
        f = ctx.obj(args["f"], "scalar")
        beta = tensorcalc.beta_f(f)
        result["degree"] = spatial_degree(f)
    else:
        beta = ctx.obj(args.get("beta", "beta"), "polyvector")
    coords = [int(c) - 1 for c in args["coords"]] if "coords" in args else None
    result["extends"] = submanifold.extends_to_projective(beta, coords)
    if f is None:
        return result, True
    result["degree_criterion"] = result["degree"] <= JACOBIAN_MAX_DEGREE
    return result, result["extends"] == result["degree_criterion"]


def cmd_brackets(ctx: ScenarioContext, args: t.Dict[str, t.Any], rng: random.Random) -> Result:
    kind = args.get("kind")
    if kind == "schouten":
        a = ctx.obj(args["a"], "polyvector")
        b = ctx.obj(args["b"], "polyvector")
        return {"bracket": format_expr(tensorcalc.schouten(a, b))}, True
    if kind == "courant":
        e1, e2 = (
            tensorcalc.GenSection(ctx.obj(s.get("vector", "0"), "polyvector"), ctx.obj(s.get("form", "0"), "form"))
            for s in (args["a"], args["b"])
        )
        bracket = tensorcalc.courant(e1, e2)
        result = {
            "bracket": {"vector": format_expr(bracket.vector), "form": format_expr(bracket.oneform)},
            "pairing": format_scalar(tensorcalc.pairing(e1, e2)),
        }
        return result, True
    raise UsageError("brackets kind must be 'courant' or 'schouten'")


COMMANDS: t.Dict[str, t.Callable[[ScenarioContext, t.Dict[str, t.Any], random.Random], Result]] = {
    "check-poisson": cmd_check_poisson,
    "poisson-sub": cmd_poisson_sub,
    "conormal-invariant": cmd_conormal_invariant,
    "j-sub": cmd_j_sub,
    "gcs-type": cmd_gcs_type,
    "kahler-pair": cmd_kahler_pair,
    "spinor-pullback": cmd_spinor_pullback,
    "deform": cmd_deform,
    "bihermitian": cmd_bihermitian,
    "obstruction-rank": cmd_obstruction_rank,
    "extends-projective": cmd_extends_projective,
    "brackets": cmd_brackets,
}


# ---------- running -----------------------------------------------------------

def _matches(expect: t.Dict[str, t.Any], result: t.Dict[str, t.Any]) -> bool:
    return all(result.get(key) == value for key, value in expect.items())


def run_command(
    command: str,
    args: t.Dict[str, t.Any],
    ctx: ScenarioContext,
    index: int = 0,
    expect: t.Optional[t.Dict[str, t.Any]] = None,
) -> TaskResult:
    """Run one command and decide its verdict.

    Raises:
        UsageError: For unknown commands and malformed arguments
    """
    handler = COMMANDS.get(command)
    if handler is None:
        raise UsageError(f"unknown command {command!r}")
    logger.info(f"Task {index}: {command}")
    try:
        result, ok = handler(ctx, args, ctx.rng(index))
        verdict = Verdict.PASS if (_matches(expect, result) if expect is not None else ok) else Verdict.FAIL
    except UsageError:
        raise
    except GenKahlerError as e:
        result = {"error": {"code": e.code, "message": str(e)}}
        if isinstance(e, DegreeBoundError):
            result["error"].update(e.details())
        if expect is not None and expect.get("error") == e.code:
            verdict = Verdict.PASS
        elif isinstance(e, UndecidedError):
            logger.warning(f"Task {index} ({command}) undecided: {e}")
            verdict = Verdict.UNDECIDED
        else:
            logger.error(f"Task {index} ({command}) failed: {e}")
            verdict = Verdict.FAIL
    if expect is not None and "error" in expect and "error" not in result:
        verdict = Verdict.FAIL
    if verdict == Verdict.FAIL and "error" not in result:
        logger.error(f"Task {index} ({command}) failed: {result}")
    return TaskResult(index=index, command=command, args=args, result=result, verdict=verdict)


def overall_verdict(verdicts: t.Iterable[str]) -> str:
    verdicts = list(verdicts)
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.UNDECIDED in verdicts:
        return Verdict.UNDECIDED
    return Verdict.PASS


def run_scenario(
    scenario: Scenario,
    settings: RunSettings,
    progress_cb: t.Optional[t.Callable[[float], None]] = None,
) -> Report:
    """Run every task of a scenario in order.

    Args:
        scenario: Validated scenario
        settings: Effective seed, order, sample count and degree bound
        progress_cb: Callback for progress updates (0-100)

    Returns:
        The report; tasks appear in scenario order
    """
    ctx = ScenarioContext(scenario, settings)
    results = []
    total = len(scenario.tasks)
    for index, task in enumerate(scenario.tasks):
        results.append(run_command(task.command, task.args, ctx, index, task.expect))
        if progress_cb:
            progress_cb(100 * (index + 1) / total)
    verdict = overall_verdict(r.verdict for r in results)
    logger.info(f"Scenario {scenario.name}: {verdict}")
    return Report(
        scenario=scenario.name,
        seed=settings.seed,
        order=settings.order,
        samples=settings.samples,
        tasks=results,
        verdict=verdict,
    )


def report_json(report: Report) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report.model_dump(), sort_keys=True, indent=2) + "\n"


def report_filename(scenario_name: str) -> str:
    """File name for a scenario report, e.g. "CP^3 cubic" -> "cp_3_cubic.json"."""
    return f"{slugify(scenario_name, separator='_')}.json"
