"""Deterministic ad hoc network simulator for augmented tree-based multi-path routing."""

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

__all__ = [
    "NetAddress",
    "SiblingRef",
    "common_prefix_len",
    "contains",
    "lowest_address",
    "parse_address",
    "parse_sibling",
    "sibling_level",
    "sibling_of",
]
