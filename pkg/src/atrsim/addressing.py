"""l-bit binary-tree address space: addresses, subtrees, siblings, prefix algebra.

Addresses are the leaves of a binary tree with l+1 levels. A level-k subtree
is the set of 2^k addresses sharing a fixed (l-k)-bit prefix. The level-k
sibling of an address is the subtree under the same parent as the address's
own level-k subtree, i.e. same top (l-k-1) bits with the next bit flipped.

Bit positions are MSB-first throughout (position 0 is the most significant
bit), so prefixes read left to right like the rendered strings ("01X").
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class NetAddress:
    """A width-bit network address (transient, reflects topological position)."""

    bits: int
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError(f"address width must be >= 1, got {self.width}")
        if not 0 <= self.bits < (1 << self.width):
            raise ValueError(f"address value {self.bits} out of range for {self.width} bits")

    def __str__(self) -> str:
        return format(self.bits, f"0{self.width}b")


@dataclass(frozen=True, order=True)
class SiblingRef:
    """A level-`level` subtree: the top (width-level) bits are fixed to `prefix`."""

    prefix: int
    level: int
    width: int

    def __post_init__(self):
        if not 0 <= self.level < self.width:
            raise ValueError(f"sibling level {self.level} out of range for {self.width} bits")
        if not 0 <= self.prefix < (1 << (self.width - self.level)):
            raise ValueError(f"prefix {self.prefix} out of range for level {self.level}")

    def __str__(self) -> str:
        return format(self.prefix, f"0{self.width - self.level}b") + "X" * self.level


def parse_address(text: str) -> NetAddress:
    """Parse a fixed-width binary string like "010" into a NetAddress."""
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"not a binary address string: {text!r}")
    return NetAddress(int(text, 2), len(text))


def parse_sibling(text: str) -> SiblingRef:
    """Parse a sibling string like "01X" (trailing X marks free bits)."""
    stripped = text.rstrip("X")
    level = len(text) - len(stripped)
    if level == len(text) or any(c not in "01" for c in stripped):
        raise ValueError(f"not a sibling string: {text!r}")
    return SiblingRef(int(stripped, 2), level, len(text))


def common_prefix_len(a: NetAddress, b: NetAddress) -> int:
    """Number of leading bits shared by a and b."""
    if a.width != b.width:
        raise ValueError("addresses of different widths")
    diff = a.bits ^ b.bits
    if diff == 0:
        return a.width
    return a.width - diff.bit_length()


def sibling_level(a: NetAddress, b: NetAddress) -> int:
    """The unique k with b in sibling_of(a, k); symmetric. a == b has no level."""
    if a == b:
        raise ValueError("an address has no sibling level with itself")
    return a.width - 1 - common_prefix_len(a, b)


def sibling_of(a: NetAddress, k: int) -> SiblingRef:
    """Level-k sibling of a: top (l-k-1) bits of a, bit (l-k-1) flipped, k bits free."""
    if not 0 <= k < a.width:
        raise ValueError(f"sibling level {k} out of range [0, {a.width - 1}]")
    return SiblingRef((a.bits >> k) ^ 1, k, a.width)


def contains(s: SiblingRef, a: NetAddress) -> bool:
    """True iff the top (l-k) bits of a equal the sibling's prefix."""
    if s.width != a.width:
        return False
    return (a.bits >> s.level) == s.prefix


def lowest_address(s: SiblingRef) -> NetAddress:
    """Canonical (numerically lowest) address inside the subtree: prefix then zeros."""
    return NetAddress(s.prefix << s.level, s.width)
