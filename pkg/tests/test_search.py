from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freelines.arrangement import (
    DuplicateLine,
    build_arrangement,
    candidate_exponents,
    canonicalize_line,
    intersection_summary,
)
from freelines.certify import Certified, check_certificate, verify_free
from freelines.fixtures import near_pencil
from freelines.scores import RewardWeights
from freelines.search import (
    ExtensionConfig,
    beam_search_build,
    bootstrap_extend,
    candidate_pool,
    cascade,
    construct_certified,
    delta_b2,
    enumerate_extension_candidates,
    load_catalog,
    save_catalog,
    supersolvable_two_pencil,
    two_pencil_witness,
)


def normalize_oracle(a, b, c):
    """Independent canonical form for the pool-completeness oracle."""
    g = gcd(gcd(abs(a), abs(b)), abs(c))
    t = (a // g, b // g, c // g)
    for v in t:
        if v:
            return t if v > 0 else (-t[0], -t[1], -t[2])
    raise AssertionError


def test_pool_r1_has_thirteen_lines():
    pool = candidate_pool(1)
    assert pool.size == 13
    coords = {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert coords <= {l.coeffs for l in pool.lines}


@pytest.mark.parametrize("bound", [1, 2])
def test_pool_completeness(bound):
    classes = set()
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            for c in range(-bound, bound + 1):
                if (a, b, c) != (0, 0, 0):
                    classes.add(normalize_oracle(a, b, c))
    pool = candidate_pool(bound)
    assert {l.coeffs for l in pool.lines} == classes
    assert pool.size == len(classes)


def test_delta_b2_examples(boolean):
    assert delta_b2(boolean, canonicalize_line(1, 1, 1)) == 3
    assert delta_b2(boolean, canonicalize_line(1, 1, 0)) == 2
    # a line through no existing point adds n fresh double points
    assert delta_b2(boolean, canonicalize_line(1, 2, 3)) == 3


def test_delta_b2_rejects_duplicates(boolean):
    with pytest.raises(DuplicateLine):
        delta_b2(boolean, boolean.lines[0])


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_delta_b2_matches_recompute(data):
    pool = candidate_pool(2).lines
    idx = data.draw(
        st.lists(st.integers(0, len(pool) - 1), min_size=2, max_size=6, unique=True)
    )
    arr = build_arrangement([pool[i] for i in idx])
    extra = data.draw(st.integers(0, len(pool) - 1))
    if pool[extra] in arr.lines:
        return
    incremental = delta_b2(arr, pool[extra])
    recomputed = (
        intersection_summary(arr.extended(pool[extra])).b2 - intersection_summary(arr).b2
    )
    assert incremental == recomputed


def test_pair_source_empty_on_boolean(boolean):
    cands = enumerate_extension_candidates(boolean, ExtensionConfig(sources=("pairs",)))
    assert cands == []


def test_pair_source_empty_on_near_pencils():
    # oracle: every join of two intersection points of a near-pencil is
    # already an arrangement line (apex joins are pencil lines; the other
    # points are collinear on the extra line)
    for n in (4, 5, 6):
        arr = near_pencil(n)
        cands = enumerate_extension_candidates(arr, ExtensionConfig(sources=("pairs",)))
        assert cands == []


def test_pair_source_two_pencil():
    arr = supersolvable_two_pencil(2, 2)
    cands = enumerate_extension_candidates(arr, ExtensionConfig(sources=("pairs",)))
    assert cands  # crossing points span joins outside the arrangement
    for line in cands:
        assert line not in arr.lines


def test_delta_target_filters_to_point_avoiding_lines(boolean):
    cfg = ExtensionConfig(sources=("pool",), pool_bound=2, delta_b2_target=3)
    cands = enumerate_extension_candidates(boolean, cfg)
    assert cands
    s = intersection_summary(boolean)
    for line in cands:
        assert all(line.evaluate(p.coords) != 0 for p in s.points)


def test_multi_source_subset_of_pairs():
    arr = supersolvable_two_pencil(3, 3)
    pairs = set(enumerate_extension_candidates(arr, ExtensionConfig(sources=("pairs",))))
    multi = set(enumerate_extension_candidates(arr, ExtensionConfig(sources=("multi",))))
    assert multi <= pairs


def test_bootstrap_extends_near_pencil(near_pencil5):
    discs = bootstrap_extend(near_pencil5, 1, 4, ExtensionConfig(pool_bound=2))
    assert discs
    profiles = [intersection_summary(d.arrangement).t for d in discs]
    assert {2: 5, 5: 1} in profiles  # the 6-line near-pencil is among them
    for d in discs:
        assert check_certificate(d.arrangement, d.certificate) == (True, None)
        assert d.provenance["source"] == "bootstrap"


def test_bootstrap_requires_matching_sum(near_pencil5):
    with pytest.raises(ValueError):
        bootstrap_extend(near_pencil5, 1, 3)


def test_bootstrap_unreachable_target_is_empty():
    # from the (2,2) two-pencil toward (1,4): delta b2 = 5 + 4 - 8 = 1, but a
    # new line meets all five lines and no point covers more than three
    seed = supersolvable_two_pencil(2, 2)
    assert bootstrap_extend(seed, 1, 4) == []


def test_two_pencil_small():
    tri = supersolvable_two_pencil(1, 1)
    assert tri.n == 3
    assert intersection_summary(tri).t == {2: 3}
    np5 = supersolvable_two_pencil(1, 3)
    assert intersection_summary(np5).t == {2: 4, 4: 1}


def test_two_pencil_witness_is_exact():
    for d1, d2 in [(1, 1), (2, 3), (4, 4)]:
        arr = supersolvable_two_pencil(d1, d2)
        out = verify_free(arr, d1, d2, witness=two_pencil_witness(d1, d2))
        assert isinstance(out, Certified)
        assert out.certificate.c == 1


@pytest.mark.parametrize("d1,d2", [(1, 1), (1, 4), (2, 2), (3, 4)])
def test_two_pencil_b2_law(d1, d2):
    arr = supersolvable_two_pencil(d1, d2)
    n = d1 + d2 + 1
    assert arr.n == n
    assert intersection_summary(arr).b2 == (n - 1) + d1 * d2
    exps = candidate_exponents(arr)
    assert (exps.d1, exps.d2) == (d1, d2)


def test_construct_certified_roundtrip():
    disc = construct_certified(2, 2)
    assert check_certificate(disc.arrangement, disc.certificate) == (True, None)
    assert disc.provenance["source"] == "two-pencil"


def test_beam_n3_finds_certified_triangle():
    entries = beam_search_build(3, 1, 1, pool=candidate_pool(1), beam_width=4, seed=0)
    assert entries
    top = entries[0]
    assert isinstance(top.outcome, Certified)
    assert intersection_summary(top.arrangement).t == {2: 3}
    # oracle: exhaustive scan of all triples over the R=1 pool
    from itertools import combinations

    certified_sets = set()
    for triple in combinations(candidate_pool(1).lines, 3):
        arr = build_arrangement(list(triple))
        if candidate_exponents(arr) is None:
            continue
        if isinstance(verify_free(arr, 1, 1), Certified):
            certified_sets.add(frozenset(triple))
    assert frozenset(top.arrangement.lines) in certified_sets


def test_beam_deterministic():
    kw = dict(pool=candidate_pool(1), beam_width=3, seed=123)
    e1 = beam_search_build(3, 1, 1, **kw)
    e2 = beam_search_build(3, 1, 1, **kw)
    assert [e.arrangement for e in e1] == [e.arrangement for e in e2]
    assert [e.cumulative_reward for e in e1] == [e.cumulative_reward for e in e2]


def test_beam_width_one_is_greedy():
    entries = beam_search_build(4, 1, 2, pool=candidate_pool(1), beam_width=1, seed=7)
    assert len(entries) == 1


def test_beam_finds_near_pencil_for_unbalanced_target():
    weights = RewardWeights(w_b2=1.0, w_int=0.0, w_mult=0.0, w_pen=0.0)
    entries = beam_search_build(
        5, 1, 3, weights=weights, pool=candidate_pool(2), beam_width=6, seed=0
    )
    assert any(
        intersection_summary(e.arrangement).t == {2: 4, 4: 1}
        and isinstance(e.outcome, Certified)
        for e in entries
    )


def test_cascade_near_pencil_chain(near_pencil5):
    catalog = cascade(
        [near_pencil5], 7, targets=[(1, 4), (1, 5)], config=ExtensionConfig(pool_bound=2)
    )
    assert (5, 1, 3) in catalog.entries  # the seed itself
    assert catalog.entries.get((6, 1, 4))
    assert catalog.entries.get((7, 1, 5))


def test_cascade_empty_seeds():
    assert cascade([], 6).size == 0


def test_cascade_nmax_below_seed(near_pencil5):
    catalog = cascade([near_pencil5], 5)
    assert catalog.size == 1  # just the certified seed


def test_cascade_deterministic(near_pencil5):
    c1 = cascade([near_pencil5], 7, targets=[(1, 4), (1, 5)], config=ExtensionConfig(pool_bound=2))
    c2 = cascade([near_pencil5], 7, targets=[(1, 4), (1, 5)], config=ExtensionConfig(pool_bound=2))
    k1 = {key: [d.certificate.arrangement_hash for d in ds] for key, ds in c1.entries.items()}
    k2 = {key: [d.certificate.arrangement_hash for d in ds] for key, ds in c2.entries.items()}
    assert k1 == k2


def test_catalog_save_load(tmp_path, near_pencil5):
    catalog = cascade([near_pencil5], 6, targets=[(1, 4)], config=ExtensionConfig(pool_bound=2))
    out = tmp_path / "catalog"
    save_catalog(catalog, str(out))
    back = load_catalog(str(out))
    assert back.size == catalog.size
    assert set(back.entries) == set(catalog.entries)
    for key, ds in back.entries.items():
        for d in ds:
            assert check_certificate(d.arrangement, d.certificate) == (True, None)


def test_threaded_extension_matches_serial(near_pencil5):
    serial = bootstrap_extend(near_pencil5, 1, 4, ExtensionConfig(pool_bound=2, threads=1))
    threaded = bootstrap_extend(near_pencil5, 1, 4, ExtensionConfig(pool_bound=2, threads=4))
    assert [d.certificate.arrangement_hash for d in serial] == [
        d.certificate.arrangement_hash for d in threaded
    ]
