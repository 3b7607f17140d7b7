"""Per-node routing table and the Path Discovery Process.

Tables are built from locally broadcast hello packets. Each hello carries one
row per sibling level that has at least one live route; a row says only
"there is at least one route" plus its best cost, the lowest node id known in
that sibling (NID), and the set of addresses the route information traversed
(routeLog, used to discard updates that already passed through the receiver).

Two storage modes share the same wire format:
  * multipath ("atr"): one entry per (level, next hop),
  * single path ("dart"): one entry per level, the cheapest found
    (ties broken by lowest next-hop address so both modes advertise
    identical rows for identical reachability).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from atrsim.addressing import NetAddress, sibling_level, sibling_of

MODE_ATR = "atr"
MODE_DART = "dart"

# an update whose routeLog is already this long is stored but not re-advertised
ROUTE_LOG_CAPACITY_IS_WIDTH = True


@dataclass
class RouteEntry:
    level: int
    next_hop: NetAddress
    nid: int
    cost: int
    route_log: frozenset[NetAddress]
    refreshed_at: int  # microseconds


@dataclass(frozen=True)
class HelloRow:
    level: int
    nid: int
    cost: int
    route_log: tuple[NetAddress, ...]  # sorted, excludes the sender itself


@dataclass(frozen=True)
class HelloPacket:
    sender_addr: NetAddress
    sender_id: int
    network_id: int
    rows: tuple[HelloRow, ...]
    pairs: tuple = ()  # piggybacked IdAddressPair objects (see lookup module)

    def signature(self):
        """Routing-relevant content only; piggyback changes do not affect it."""
        return (self.sender_addr.bits, self.sender_id, self.network_id, self.rows)


@dataclass
class UpdateReport:
    """What process_hello did, plus the inputs duplicate/merge detection needs."""

    sibling_lvl: int | None = None
    added: int = 0
    refreshed: int = 0
    withdrawn: int = 0
    malformed: int = 0
    duplicate_addr: bool = False
    region_row: HelloRow | None = None


def _entry_key(e: RouteEntry) -> tuple[int, int]:
    return (e.cost, e.next_hop.bits)


class RoutingTable:
    def __init__(self, owner_addr: NetAddress, owner_id: int, mode: str = MODE_ATR):
        if mode not in (MODE_ATR, MODE_DART):
            raise ValueError(f"unknown table mode: {mode}")
        self.owner_addr = owner_addr
        self.owner_id = owner_id
        self.width = owner_addr.width
        self.mode = mode
        # level -> next_hop bits -> RouteEntry (dart keeps at most one per level)
        self.levels: dict[int, dict[int, RouteEntry]] = {}
        self.version = 0
        self._hello_cache: tuple[int, tuple[HelloRow, ...]] | None = None

    # -- queries ----------------------------------------------------------

    def entries_at(self, level: int) -> list[RouteEntry]:
        return list(self.levels.get(level, {}).values())

    def all_entries(self) -> list[RouteEntry]:
        return [e for slot in self.levels.values() for e in slot.values()]

    def entry_count(self) -> int:
        return sum(len(slot) for slot in self.levels.values())

    def get(self, level: int, next_hop: NetAddress) -> RouteEntry | None:
        return self.levels.get(level, {}).get(next_hop.bits)

    def region_nid(self, level: int) -> int:
        """Lowest id the owner knows inside its own level-`level` subtree."""
        nid = self.owner_id
        for k in range(level):
            for e in self.levels.get(k, {}).values():
                if e.nid < nid:
                    nid = e.nid
        return nid

    def has_entries_below(self, level: int) -> bool:
        return any(self.levels.get(k) for k in range(level))

    # -- mutation ---------------------------------------------------------

    def _touch(self):
        self.version += 1
        self._hello_cache = None

    def _upsert(self, cand: RouteEntry) -> bool:
        """Apply the mode's storage rule. Returns True if the table changed."""
        slot = self.levels.setdefault(cand.level, {})
        if self.mode == MODE_ATR:
            slot[cand.next_hop.bits] = cand
            return True
        # single-path: keep the cheapest entry, but a neighbour's fresh update
        # always supersedes that same neighbour's older one
        if not slot:
            slot[cand.next_hop.bits] = cand
            return True
        existing = next(iter(slot.values()))
        if existing.next_hop == cand.next_hop or _entry_key(cand) < _entry_key(existing):
            slot.clear()
            slot[cand.next_hop.bits] = cand
            return True
        return False

    def _remove(self, level: int, next_hop_bits: int) -> RouteEntry | None:
        slot = self.levels.get(level)
        if slot and next_hop_bits in slot:
            e = slot.pop(next_hop_bits)
            if not slot:
                del self.levels[level]
            return e
        return None

    def process_hello(self, hello: HelloPacket, now: int) -> UpdateReport:
        """Ingest a neighbour's routing update (single physical hop away)."""
        report = UpdateReport()
        if hello.sender_addr == self.owner_addr:
            report.duplicate_addr = True
            return report
        if hello.sender_addr.width != self.width:
            report.malformed = len(hello.rows)
            return report
        sl = sibling_level(self.owner_addr, hello.sender_addr)
        report.sibling_lvl = sl

        sender = hello.sender_addr
        covered: set[int] = set()
        nid_below = hello.sender_id
        for row in hello.rows:
            if not 0 <= row.level < self.width:
                report.malformed += 1
                continue
            if row.level == sl:
                report.region_row = row
                continue
            if row.level < sl:
                # regions inside the sender's own subtree; they only refine the
                # NID of the direct entry below
                if row.nid < nid_below:
                    nid_below = row.nid
                continue
            log = frozenset(row.route_log) | {sender}
            if self.owner_addr in log or len(log) > self.width:
                # already travelled through us, or log at capacity: unusable here
                continue
            covered.add(row.level)
            cand = RouteEntry(row.level, sender, row.nid, row.cost + 1, log, now)
            if self._upsert(cand):
                report.added += 1
            else:
                report.refreshed += 1

        # direct entry for the sibling the sender itself sits in
        direct = RouteEntry(sl, sender, nid_below, 1, frozenset((sender,)), now)
        if self._upsert(direct):
            report.added += 1

        # rows absent from this hello withdraw what the sender previously offered
        for k in range(sl + 1, self.width):
            if k not in covered and self._remove(k, sender.bits):
                report.withdrawn += 1

        self._touch()
        return report

    def refresh_neighbor(self, sender_addr: NetAddress, now: int) -> int:
        """Fast path for a hello whose content is unchanged: touch timestamps."""
        touched = 0
        for slot in self.levels.values():
            e = slot.get(sender_addr.bits)
            if e is not None:
                e.refreshed_at = now
                touched += 1
        return touched

    def expire(self, now: int, threshold: int) -> list[RouteEntry]:
        """Drop entries not confirmed within `threshold` us (strict inequality).

        Losing the direct entry for a neighbour drops every route through it.
        """
        removed: list[RouteEntry] = []
        dead_neighbors: set[int] = set()
        for level in list(self.levels):
            for bits, e in list(self.levels.get(level, {}).items()):
                if now - e.refreshed_at > threshold:
                    self._remove(level, bits)
                    removed.append(e)
                    if level == sibling_level(self.owner_addr, e.next_hop):
                        dead_neighbors.add(bits)
        if dead_neighbors:
            for level in list(self.levels):
                for bits in list(self.levels.get(level, {})):
                    if bits in dead_neighbors:
                        gone = self._remove(level, bits)
                        if gone is not None:
                            removed.append(gone)
        if removed:
            self._touch()
        return removed

    def drop_neighbor(self, next_hop: NetAddress) -> int:
        """Remove every entry through the given next hop."""
        n = 0
        for level in list(self.levels):
            if self._remove(level, next_hop.bits):
                n += 1
        if n:
            self._touch()
        return n

    # -- advertisement ----------------------------------------------------

    def hello_rows(self) -> tuple[HelloRow, ...]:
        """One row per level with at least one advertisable route.

        Cost is the level's minimum, NID the level's minimum, and the routeLog
        comes from the minimum-cost entry (ties: lowest next-hop address).
        Entries whose log is at capacity are not re-advertised.
        """
        if self._hello_cache is not None and self._hello_cache[0] == self.version:
            return self._hello_cache[1]
        rows = []
        for level in sorted(self.levels):
            advertisable = [
                e for e in self.levels[level].values() if len(e.route_log) < self.width
            ]
            if not advertisable:
                continue
            best = min(advertisable, key=_entry_key)
            nid = min(e.nid for e in advertisable)
            log = tuple(sorted(best.route_log))
            rows.append(HelloRow(level, nid, best.cost, log))
        rows = tuple(rows)
        self._hello_cache = (self.version, rows)
        return rows

    def build_hello(self, network_id: int, pairs: tuple = ()) -> HelloPacket:
        return HelloPacket(self.owner_addr, self.owner_id, network_id, self.hello_rows(), pairs)


# -- wire format -----------------------------------------------------------
#
# header : sender addr (ceil(l/8) bytes, big endian) | sender id (4) |
#          network id (4) | row count (1)
# row    : level (1) | nid (4) | cost (2) | log count (1) | log addresses
# piggy  : pair count (1) | pairs (id 4 + addr ceil(l/8) each)


def addr_bytes(width: int) -> int:
    return (width + 7) // 8


def _pack_addr(a: NetAddress) -> bytes:
    return a.bits.to_bytes(addr_bytes(a.width), "big")


def hello_wire_size(hello: HelloPacket) -> int:
    ab = addr_bytes(hello.sender_addr.width)
    size = ab + 4 + 4 + 1
    for row in hello.rows:
        size += 1 + 4 + 2 + 1 + ab * len(row.route_log)
    size += 1 + (4 + ab) * len(hello.pairs)
    return size


def encode_hello(hello: HelloPacket) -> bytes:
    out = bytearray()
    out += _pack_addr(hello.sender_addr)
    out += struct.pack(">IIB", hello.sender_id, hello.network_id, len(hello.rows))
    for row in hello.rows:
        out += struct.pack(">BIHB", row.level, row.nid, row.cost, len(row.route_log))
        for a in row.route_log:
            out += _pack_addr(a)
    out += struct.pack(">B", len(hello.pairs))
    for pair in hello.pairs:
        out += struct.pack(">I", pair.node_id)
        out += _pack_addr(pair.addr)
    return bytes(out)


# -- text rendering (golden dumps) ------------------------------------------


def render_table(table: RoutingTable) -> str:
    """Table dump: one line per entry, ordered by (level, next hop)."""
    lines = ["level sibling nextHop ID cost"]
    for level in sorted(table.levels):
        sib = str(sibling_of(table.owner_addr, level))
        for bits in sorted(table.levels[level]):
            e = table.levels[level][bits]
            lines.append(f"{level} {sib} {e.next_hop} {e.nid} {e.cost}")
    return "\n".join(lines) + "\n"


def render_hello(hello: HelloPacket) -> str:
    """Routing-update dump in the advertised-row layout."""
    lines = ["level sibling NID cost routeLog"]
    for row in hello.rows:
        sib = str(sibling_of(hello.sender_addr, row.level))
        log = ",".join(str(a) for a in row.route_log)
        lines.append(f"{row.level} {sib} {row.nid} {row.cost} {log}")
    return "\n".join(lines) + "\n"
