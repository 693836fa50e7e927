import pytest

from cubeau import cubes


def brute_reps(n, k):
    """Independent oracle: plain nested recursion, no pruning tricks."""
    out = []

    def rec(rem, parts, lo, acc):
        if parts == 0:
            if rem == 0:
                out.append(tuple(acc))
            return
        a = lo
        while a**3 * parts <= rem:
            rec(rem - a**3, parts - 1, a, acc + [a])
            a += 1

    rec(n, k, 1, [])
    return out


@pytest.fixture(scope="module")
def sieve4():
    return cubes.build_sieve(10**4, 4)


def test_representation_examples():
    assert cubes.representations(2, 2) == [(1, 1)]
    assert cubes.representations(91, 2) == [(3, 4)]
    assert cubes.representations(12, 2) == []
    assert cubes.representations(1729, 2) == [(1, 12), (9, 10)]


def test_representations_are_exact_and_sorted():
    for n in (216, 1729, 4104):
        reps = cubes.representations(n, 3)
        assert reps == sorted(reps)
        for rep in reps:
            assert sum(a**3 for a in rep) == n
            assert all(a <= b for a, b in zip(rep, rep[1:]))


def test_representations_rejects_bad_args():
    with pytest.raises(ValueError):
        cubes.representations(0, 2)
    with pytest.raises(ValueError):
        cubes.representations(5, 1)


def test_sieve_membership_examples(sieve4):
    assert sieve4.member(4)
    assert sieve4.member(30)
    assert not sieve4.member(5)


def test_sieve_resource_ceiling():
    with pytest.raises(cubes.ResourceLimit):
        cubes.build_sieve(10**6, 4, ceiling=10**5)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_sieve_agrees_with_enumeration(k):
    sieve = cubes.build_sieve(2000, k)
    for n in range(1, 2001):
        assert sieve.member(n) == bool(brute_reps(n, k)), (n, k)


def test_scaling_closure():
    # doubling all bases multiplies the sum by 8
    sieve = cubes.build_sieve(4000, 3)
    for n in range(1, 501):
        if sieve.member(n):
            assert sieve.member(8 * n), n


def test_lift_by_6_and_7():
    # every cube representation lifts: r parts -> r+2 (x6) and r+3 (x7)
    for base, rep in [(6, (3, 4, 5)), (2, (2,)), (9, (1, 6, 8))]:
        assert sum(a**3 for a in rep) == base**3
        lifted6 = tuple(6 * a for a in rep[:-1]) + (3 * rep[-1], 4 * rep[-1], 5 * rep[-1])
        assert sum(a**3 for a in lifted6) == (6 * base) ** 3
        lifted7 = tuple(7 * a for a in rep[:-1]) + (
            rep[-1], rep[-1], 5 * rep[-1], 6 * rep[-1])
        assert sum(a**3 for a in lifted7) == (7 * base) ** 3


def test_exceptional_stats_counts(sieve4):
    rows = cubes.exceptional_stats(sieve4, [1000, 10**4])
    assert rows[0][1] == 716  # frozen from the brute-force oracle
    assert rows[1][1] == 6015
    assert rows[0][2] > rows[1][2]


def test_exceptional_stats_k2_mod9_lower_bound():
    sieve = cubes.build_sieve(1000, 2)
    (_, count, _), = cubes.exceptional_stats(sieve, [1000])
    assert count == 959  # frozen oracle value
    mod9 = sum(1 for n in range(1, 1001) if n % 9 in (3, 6))
    assert count >= mod9 == 222


def test_exceptional_stats_k9_small_tail():
    sieve = cubes.build_sieve(10**4, 9)
    (_, count, _), = cubes.exceptional_stats(sieve, [10**4])
    assert count == 114  # frozen oracle value
    assert all(sieve.member(n) for n in range(1072, 10**4 + 1))


def test_checkpoint_beyond_limit(sieve4):
    with pytest.raises(ValueError):
        cubes.exceptional_stats(sieve4, [10**5])


def test_find_witness_frozen_values():
    assert cubes.find_witness(3, 1, 4, 1000) == 56
    assert cubes.find_witness(5, 2, 5, 1000) == 19
    assert cubes.find_witness(2, 1, 4, 1000) == 37


def test_find_witness_properties():
    m = cubes.find_witness(3, 1, 4, 1000)
    assert m % 3 != 0
    assert cubes.has_representation(m, 4)
    assert cubes.has_representation(3 * m, 4)


def test_find_witness_not_found():
    with pytest.raises(cubes.NotFound):
        cubes.find_witness(3, 1, 4, 3)


def test_mod9_obstruction_scan():
    report = cubes.mod9_obstruction_scan(1000)
    assert report.clean
    assert report.scanned == 222
    assert not cubes.representations(21, 2)
    assert 21 % 9 == 3


def test_snapshot_round_trip(tmp_path, sieve4):
    path = tmp_path / "s.cubesieve"
    cubes.save_sieve(sieve4, path)
    loaded = cubes.load_sieve(path)
    assert loaded == sieve4
    raw = path.read_bytes()
    assert raw[:8] == b"CUBESIEV"
    assert int.from_bytes(raw[8:12], "little") == 4
    assert int.from_bytes(raw[12:20], "little") == 10**4


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTASIEV" + b"\0" * 12)
    with pytest.raises(ValueError):
        cubes.load_sieve(path)
