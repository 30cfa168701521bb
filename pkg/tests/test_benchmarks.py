"""Generator and evaluation tests for the two benchmark families."""
import pytest

from asplearn.benchmarks import (
    Benchmark,
    BenchmarkSpec,
    Graph,
    HAMILTON_TARGET,
    JOURNEY_TARGET,
    Journey,
    answer_set_cost,
    classify_graph,
    evaluate,
    gen_hamilton,
    gen_journey,
    generate,
    graph_facts,
    is_hamiltonian,
    journey_facts,
    tests_from_jsonable,
    tests_to_jsonable,
)
from asplearn.errors import SpaceError
from asplearn.parser import parse_program
from asplearn.solver import Ordering, compare
from asplearn.taskfile import INFINITE, render_task


# ---------------------------------------------------------------------------
# Reproducibility


def test_equal_specs_give_identical_task_files_and_tests():
    for family in ("hamilton", "journey"):
        spec = BenchmarkSpec(family, 12, noise=0.25, seed=7, test_size=9)
        a, b = generate(spec), generate(spec)
        assert render_task(a.task) == render_task(b.task)
        assert a.tests == b.tests
        assert a.metadata == b.metadata


def test_different_seeds_differ():
    a = generate(BenchmarkSpec("hamilton", 10, seed=0))
    b = generate(BenchmarkSpec("hamilton", 10, seed=1))
    assert render_task(a.task) != render_task(b.task)


# ---------------------------------------------------------------------------
# Hamilton generator


def test_hamilton_labels_match_brute_force_before_flips():
    bench = gen_hamilton(BenchmarkSpec("hamilton", 30, noise=0.0, seed=3))
    assert bench.metadata["flipped"] == []
    # with no noise, each positive context really is Hamiltonian
    for ex in bench.task.positives:
        graph = _graph_from_facts(ex.ctx)
        assert is_hamiltonian(graph)
    for ex in bench.task.negatives:
        assert not is_hamiltonian(_graph_from_facts(ex.ctx))


def _graph_from_facts(ctx):
    nodes = []
    edges = []
    for rule in ctx:
        atom = rule.head
        args = tuple(a.value for a in atom.args)
        if atom.pred == "node":
            nodes.append(args[0])
        else:
            edges.append(args)
    return Graph(max(nodes), tuple(sorted(edges)))


def test_hamilton_flip_count_is_floor_of_noise_times_n():
    bench = gen_hamilton(BenchmarkSpec("hamilton", 20, noise=0.10, seed=5))
    assert len(bench.metadata["flipped"]) == 2
    clean = gen_hamilton(BenchmarkSpec("hamilton", 20, noise=0.0, seed=5))
    # flipping moves examples across the positive/negative split
    flipped = set(bench.metadata["flipped"])
    clean_pos = {e.eid for e in clean.task.positives}
    noisy_pos = {e.eid for e in bench.task.positives}
    assert clean_pos ^ noisy_pos == flipped


def test_hamilton_examples_have_unit_penalty_and_empty_pi():
    bench = gen_hamilton(BenchmarkSpec("hamilton", 8, seed=2))
    for ex in bench.task.positives + bench.task.negatives:
        assert ex.penalty == 1
        assert ex.pi.inc == () and ex.pi.exc == ()


def test_target_program_classifies_perfectly():
    bench = gen_hamilton(BenchmarkSpec("hamilton", 4, seed=11, test_size=60))
    report = evaluate(HAMILTON_TARGET, "hamilton", bench.tests)
    assert report.accuracy == 1.0
    assert report.f1 == 1.0


def test_classify_graph_on_known_graphs():
    ham = Graph(3, ((1, 2), (2, 3), (3, 1)))
    non = Graph(3, ((1, 2), (2, 3)))
    assert classify_graph(HAMILTON_TARGET, graph_facts(ham))
    assert not classify_graph(HAMILTON_TARGET, graph_facts(non))
    assert is_hamiltonian(ham) and not is_hamiltonian(non)


def test_single_node_needs_self_loop():
    assert is_hamiltonian(Graph(1, ((1, 1),)))
    assert not is_hamiltonian(Graph(1, ()))
    assert classify_graph(HAMILTON_TARGET, graph_facts(Graph(1, ((1, 1),))))
    assert not classify_graph(HAMILTON_TARGET, graph_facts(Graph(1, ())))


# ---------------------------------------------------------------------------
# Journey generator


def test_journey_positives_are_hard_and_orderings_unit():
    bench = gen_journey(JOURNEY_TARGET, BenchmarkSpec("journey", 10, seed=4))
    assert len(bench.task.positives) == 20  # two sides per ordering
    assert all(ex.penalty == INFINITE for ex in bench.task.positives)
    assert len(bench.task.brave_orderings) == 10
    assert all(o.penalty == 1 for o in bench.task.brave_orderings)
    ops = [o.op for o in bench.task.brave_orderings]
    assert sorted(ops) == ["<"] * 5 + ["="] * 5


def test_journey_ops_match_target_costs_before_flips():
    bench = gen_journey(JOURNEY_TARGET, BenchmarkSpec("journey", 14, seed=9))
    assert bench.metadata["flipped"] == []
    for o in bench.task.brave_orderings:
        lc = answer_set_cost(JOURNEY_TARGET, o.left.ctx)
        rc = answer_set_cost(JOURNEY_TARGET, o.right.ctx)
        assert compare(lc, rc).value == o.op


def test_journey_noise_flips_ops():
    spec = BenchmarkSpec("journey", 10, noise=0.20, seed=6)
    noisy = gen_journey(JOURNEY_TARGET, spec)
    clean = gen_journey(JOURNEY_TARGET, BenchmarkSpec("journey", 10, seed=6))
    flipped = set(noisy.metadata["flipped"])
    assert len(flipped) == 2
    by_id = {o.eid: o.op for o in clean.task.brave_orderings}
    for o in noisy.task.brave_orderings:
        if o.eid in flipped:
            want = ">" if by_id[o.eid] == "<" else "!="
            assert o.op == want
        else:
            assert o.op == by_id[o.eid]


def test_journey_target_self_evaluation_is_perfect():
    bench = gen_journey(
        JOURNEY_TARGET, BenchmarkSpec("journey", 4, seed=8, test_size=40)
    )
    report = evaluate(JOURNEY_TARGET, "journey", bench.tests)
    assert report.accuracy == 1.0


def test_out_of_space_target_is_rejected():
    target = parse_program(":~ leg_mode(L, walk), leg_mode(M, car), leg_mode(N, bus).[1@1, L, M, N]")
    with pytest.raises(SpaceError):
        gen_journey(target, BenchmarkSpec("journey", 2, seed=0))


def test_permuted_legs_cost_the_same():
    journey = Journey((("walk", 12, 4), ("car", 3, 1), ("bus", 70, 2)))
    permuted = Journey((("car", 3, 1), ("bus", 70, 2), ("walk", 12, 4)))
    lc = answer_set_cost(JOURNEY_TARGET, journey_facts(journey))
    rc = answer_set_cost(JOURNEY_TARGET, journey_facts(permuted))
    assert compare(lc, rc) is Ordering.EQUAL


def test_generated_equal_pairs_really_cost_equal():
    bench = gen_journey(JOURNEY_TARGET, BenchmarkSpec("journey", 12, seed=13))
    for o in bench.task.brave_orderings:
        if o.op != "=":
            continue
        lc = answer_set_cost(JOURNEY_TARGET, o.left.ctx)
        rc = answer_set_cost(JOURNEY_TARGET, o.right.ctx)
        assert compare(lc, rc) is Ordering.EQUAL


# ---------------------------------------------------------------------------
# Spec validation and evaluation edge cases


def test_spec_validation():
    with pytest.raises(ValueError):
        BenchmarkSpec("tsp", 5)
    with pytest.raises(ValueError):
        BenchmarkSpec("hamilton", -1)
    with pytest.raises(ValueError):
        BenchmarkSpec("hamilton", 5, noise=1.0)
    with pytest.warns(UserWarning):
        BenchmarkSpec("hamilton", 5, noise=0.6)


def test_evaluate_rejects_empty_tests_and_unknown_family():
    with pytest.raises(ValueError):
        evaluate(HAMILTON_TARGET, "hamilton", ())
    with pytest.raises(ValueError):
        evaluate(HAMILTON_TARGET, "tsp", ((Graph(1, ()), False),))


def test_f1_closed_form():
    # one true positive, one false positive, no false negatives
    tests = (
        (Graph(3, ((1, 2), (2, 3), (3, 1))), True),   # predicted Ham, is Ham
        (Graph(1, ()), True),                          # predicted non-Ham, "true"
        (Graph(2, ((1, 2), (2, 1))), False),           # predicted Ham, labelled non-Ham
    )
    report = evaluate(HAMILTON_TARGET, "hamilton", tests)
    assert report.precision == pytest.approx(0.5)
    assert report.recall == pytest.approx(0.5)
    assert report.f1 == pytest.approx(0.5)
    assert report.accuracy == pytest.approx(1 / 3)


def test_json_round_trip_both_families():
    ham = gen_hamilton(BenchmarkSpec("hamilton", 2, seed=1, test_size=7))
    data = tests_to_jsonable("hamilton", ham.tests)
    assert tests_from_jsonable("hamilton", data) == ham.tests

    jny = gen_journey(JOURNEY_TARGET, BenchmarkSpec("journey", 2, seed=1, test_size=5))
    data = tests_to_jsonable("journey", jny.tests)
    back = tests_from_jsonable("journey", data)
    assert back == jny.tests
