import pytest
from hypothesis import given, strategies as st

from atrsim.addressing import (
    NetAddress,
    SiblingRef,
    common_prefix_len,
    contains,
    lowest_address,
    parse_address,
    parse_sibling,
    sibling_level,
    sibling_of,
)


def brute_common_prefix(a_bits, b_bits, width):
    """Independent oracle: count matching leading bits character by character."""
    sa = format(a_bits, f"0{width}b")
    sb = format(b_bits, f"0{width}b")
    n = 0
    for ca, cb in zip(sa, sb):
        if ca != cb:
            break
        n += 1
    return n


def addr(text):
    return parse_address(text)


def test_sibling_of_table1_rows():
    a = addr("000")
    assert str(sibling_of(a, 0)) == "001"
    assert str(sibling_of(a, 1)) == "01X"
    assert str(sibling_of(a, 2)) == "1XX"


def test_sibling_of_complement_case():
    assert str(sibling_of(addr("111"), 2)) == "0XX"


def test_sibling_of_rejects_bad_level():
    with pytest.raises(ValueError):
        sibling_of(addr("000"), 3)
    with pytest.raises(ValueError):
        sibling_of(addr("000"), -1)


def test_sibling_level_examples():
    assert sibling_level(addr("000"), addr("001")) == 0
    assert sibling_level(addr("000"), addr("010")) == 1
    assert sibling_level(addr("000"), addr("100")) == 2


def test_sibling_level_self_rejected():
    with pytest.raises(ValueError):
        sibling_level(addr("101"), addr("101"))


def test_sibling_level_exhaustive_l3_against_prefix_oracle():
    width = 3
    for a in range(8):
        for b in range(8):
            if a == b:
                continue
            na, nb = NetAddress(a, width), NetAddress(b, width)
            expected = width - 1 - brute_common_prefix(a, b, width)
            assert sibling_level(na, nb) == expected
            assert sibling_level(na, nb) == sibling_level(nb, na)


def test_contains_examples():
    s = parse_sibling("01X")
    assert contains(s, addr("010"))
    assert contains(s, addr("011"))
    assert not contains(s, addr("001"))
    ones = parse_sibling("1XX")
    for b in range(8):
        assert contains(ones, NetAddress(b, 3)) == (b >= 4)


def test_siblings_cover_everything_but_self():
    # union over k of sibling_of(a, k) is the whole space minus a, for l <= 6
    for width in range(1, 7):
        for a_bits in range(1 << width):
            a = NetAddress(a_bits, width)
            covered = set()
            for k in range(width):
                s = sibling_of(a, k)
                members = {b for b in range(1 << width) if contains(s, NetAddress(b, width))}
                assert len(members) == (1 << k)
                assert not covered & members, "siblings must be pairwise disjoint"
                covered |= members
            assert covered == set(range(1 << width)) - {a_bits}


def test_partition_property_l8_spot():
    width = 8
    for a_bits in (0, 1, 77, 128, 255):
        a = NetAddress(a_bits, width)
        total = 1  # self
        for k in range(width):
            total += 1 << k
        assert total == 1 << width


def test_contains_iff_sibling_level():
    width = 4
    for a_bits in range(1 << width):
        a = NetAddress(a_bits, width)
        for b_bits in range(1 << width):
            if a_bits == b_bits:
                continue
            b = NetAddress(b_bits, width)
            k = sibling_level(a, b)
            for j in range(width):
                assert contains(sibling_of(a, j), b) == (j == k)


@given(st.integers(0, 2**10 - 1), st.integers(0, 2**10 - 1), st.integers(0, 2**10 - 1))
def test_monotonicity_longer_prefix_lower_level(x, y, z):
    width = 10
    a, b, c = NetAddress(x, width), NetAddress(y, width), NetAddress(z, width)
    if x in (y, z):
        return
    if common_prefix_len(a, b) > common_prefix_len(a, c):
        assert sibling_level(a, b) < sibling_level(a, c)


def test_lowest_address_examples():
    assert str(lowest_address(parse_sibling("1XX"))) == "100"
    assert str(lowest_address(parse_sibling("01X"))) == "010"
    assert str(lowest_address(parse_sibling("001"))) == "001"


def test_render_parse_roundtrip():
    for text in ("000", "101", "11111111", "00000001"):
        assert str(parse_address(text)) == text
    for text in ("01X", "1XX", "0XXX", "10101010"[:4] + "XXXX"):
        assert str(parse_sibling(text)) == text


def test_address_validation():
    with pytest.raises(ValueError):
        NetAddress(8, 3)
    with pytest.raises(ValueError):
        NetAddress(-1, 3)
    with pytest.raises(ValueError):
        parse_address("01x")
    with pytest.raises(ValueError):
        parse_sibling("XXX")


def test_sibling_ref_size_invariant():
    # a level-k sibling denotes exactly 2^k addresses
    for width in (3, 5):
        for a_bits in range(1 << width):
            for k in range(width):
                s = sibling_of(NetAddress(a_bits, width), k)
                count = sum(
                    1 for b in range(1 << width) if contains(s, NetAddress(b, width))
                )
                assert count == 1 << k
