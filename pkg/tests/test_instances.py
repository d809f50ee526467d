import json
from itertools import combinations

import numpy as np
import pytest

from hkdyn.instances import (
    InstanceFormatError,
    InstanceSpec,
    InstanceValidationError,
    dumbbell_influence_edges,
    dumbbell_layout,
    dumbbell_mhat,
    dumbbell_social_edges,
    dumps_instance,
    gen_complete_random,
    gen_dumbbell,
    gen_path,
    load_instance,
    loads_instance,
    save_instance,
)

EPS = 100.0


def test_path_examples():
    s = gen_path(3, EPS)
    assert list(s.positions[:, 0]) == [100.0, 200.0, 300.0]
    two = gen_path(2, EPS)
    assert two.graph.edges == [(0, 1)] and two.edge_length(0, 1) == EPS
    with pytest.raises(ValueError):
        gen_path(1, EPS)


@pytest.mark.parametrize("n", [2, 5, 33])
def test_path_properties(n):
    s = gen_path(n, EPS)
    assert len(s.influence_network()) == n - 1
    assert all(s.edge_length(u, v) == EPS for u, v in s.graph.edges)
    assert s.is_socially_stable_state()


def test_dumbbell_mhat_matches_both_normalizations():
    for n in (16, 32, 64, 128):
        k = n // 4
        assert dumbbell_mhat(n, EPS) == EPS / (k * k + 5 * k - 1)
        assert dumbbell_mhat(n, EPS) == pytest.approx(EPS / (n * n / 16 + 5 * n / 4 - 1), rel=1e-15)
    assert dumbbell_mhat(16, EPS) == EPS / 35


def test_dumbbell_16_path_edge_labels():
    s = gen_dumbbell(16, EPS)
    m = EPS / 35
    lay = dumbbell_layout(16)
    line = [lay["left_hub"], *lay["chain"], lay["right_hub"]]
    lengths = [s.edge_length(a, b) for a, b in zip(line, line[1:])]
    expected = [EPS - 9 * m, EPS - 6 * m, EPS - 3 * m, EPS, EPS - 3 * m, EPS - 6 * m, EPS - 9 * m]
    assert np.allclose(lengths, expected, rtol=1e-12)


@pytest.mark.parametrize("n", [16, 32, 64])
def test_dumbbell_uniform_movement(n):
    s = gen_dumbbell(n, EPS)
    _, moves = s.movements()
    assert np.allclose(np.abs(moves[:, 0]), dumbbell_mhat(n, EPS), rtol=1e-9, atol=0)


def test_dumbbell_cliques_coincide_and_far_pairs_inactive():
    n = 32
    s = gen_dumbbell(n, EPS)
    lay = dumbbell_layout(n)
    for key in ("left_clique", "right_clique"):
        assert len(set(s.positions[lay[key], 0])) == 1
    line = [lay["left_hub"], *lay["chain"], lay["right_hub"]]
    for i, j in combinations(range(len(line)), 2):
        if j - i >= 2:
            assert s.edge_length(line[i], line[j]) > EPS


def test_dumbbell_variants():
    full = gen_dumbbell(16, EPS, full_social=True)
    reduced = gen_dumbbell(16, EPS, full_social=False)
    assert full.graph.edges == dumbbell_social_edges(16)
    assert reduced.graph.edges == dumbbell_influence_edges(16)
    assert full.influence_network() == reduced.influence_network()
    assert np.array_equal(full.positions, reduced.positions)
    assert full.graph.m > reduced.graph.m


@pytest.mark.parametrize("n", [10, 12, 8, 17])
def test_dumbbell_bad_sizes(n):
    with pytest.raises(ValueError):
        gen_dumbbell(n, EPS)


def test_complete_random_examples():
    one = gen_complete_random(1, 2, EPS, EPS, 0)
    assert one.graph.m == 0 and one.is_delta_stable(1.0)
    a = gen_complete_random(20, 3, EPS, 50.0, 9)
    b = gen_complete_random(20, 3, EPS, 50.0, 9)
    assert np.array_equal(a.positions, b.positions)
    dense = gen_complete_random(50, 1, EPS, EPS / 2, 1)
    assert len(dense.influence_network()) == 50 * 49 // 2
    with pytest.raises(ValueError):
        gen_complete_random(0, 1, EPS, 1.0, 0)


def test_instance_spec_validation_and_build():
    with pytest.raises(ValueError):
        InstanceSpec("dumbbell-full", 10)
    with pytest.raises(ValueError):
        InstanceSpec("path", 1)
    with pytest.raises(ValueError):
        InstanceSpec("complete-random", 5)
    with pytest.raises(ValueError):
        InstanceSpec("ring", 5)
    with pytest.raises(ValueError):
        InstanceSpec("custom", 2)
    assert InstanceSpec("path", 4).build().n == 4
    assert InstanceSpec("dumbbell-reduced", 16).build().graph.edges == dumbbell_influence_edges(16)
    custom = InstanceSpec("custom", 2, positions=[0.0, 1.0], edges=[(0, 1)]).build()
    assert custom.graph.edges == [(0, 1)]


def test_round_trip_bit_exact(tmp_path):
    for s in (gen_path(3, EPS), gen_dumbbell(16, EPS), gen_complete_random(7, 3, 1 / 3, 0.7, 4)):
        path = save_instance(s, tmp_path / "x.json")
        back = load_instance(path)
        assert np.array_equal(back.positions, s.positions)
        assert back.graph.edges == s.graph.edges
        assert back.epsilon == s.epsilon and back.dimension == s.dimension


def test_loader_normalizes_edge_order():
    doc = {"dimension": 1, "epsilon": 1.0, "positions": [[0.0], [1.0], [2.0]], "edges": [[2, 1], [1, 0]]}
    assert loads_instance(json.dumps(doc)).graph.edges == [(0, 1), (1, 2)]


def _doc(**kw):
    base = {"dimension": 1, "epsilon": 1.0, "positions": [[0.0], [1.0]], "edges": [[0, 1]]}
    base.update(kw)
    return json.dumps(base)


@pytest.mark.parametrize("kw", [
    {"edges": [[0, 0]]},
    {"edges": [[0, 1], [1, 0]]},
    {"edges": [[0, 5]]},
    {"positions": [[0.0, 1.0], [1.0]]},
    {"dimension": 0},
    {"dimension": True},
    {"epsilon": -1.0},
    {"positions": [[0.0], ["a"]]},
    {"edges": [[0, 1.5]]},
])
def test_validation_errors(kw):
    with pytest.raises(InstanceValidationError):
        loads_instance(_doc(**kw))


def test_format_errors_carry_location():
    with pytest.raises(InstanceFormatError, match="line 2"):
        loads_instance('{\n  "dimension": ,\n}')
    with pytest.raises(InstanceFormatError, match="edges"):
        loads_instance('{"dimension": 1, "epsilon": 1, "positions": []}')
    with pytest.raises(InstanceFormatError):
        loads_instance("[1, 2]")


def test_dumps_is_valid_json_one_row_per_line():
    text = dumps_instance(gen_path(3, EPS))
    assert json.loads(text)["positions"] == [[100.0], [200.0], [300.0]]
    assert "[100.0]," in text.splitlines()[4]


def test_missing_file_reports_path(tmp_path):
    with pytest.raises(OSError, match="nope.json"):
        load_instance(tmp_path / "nope.json")
