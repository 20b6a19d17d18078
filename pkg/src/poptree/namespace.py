"""In-memory model of a multi-writer DHT namespace.

Mirrors the storage semantics of DHTs used for decentralized tracking:
each peer may store one value per key, values from different peers
coexist under the same key, and a later put by the same peer replaces
its earlier value.  Name resolution is two-step: a textual node name is
digested to a key, and the key holds the version records peers have
registered.  The number of peers registered to a record is the
popularity signal that drives default browsing.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

Key = bytes
PeerId = int


class KeyCollisionError(RuntimeError):
    """Two distinct names digested to the same key.

    At the scales this model runs at, a collision means the digest is
    being misused, so the run aborts instead of modeling it.
    """


def digest(text: str) -> Key:
    """Stable 160-bit digest used for node names and version content ids."""
    return hashlib.sha1(text.encode("utf-8")).digest()


def node_name(index: int) -> str:
    """Canonical textual name of a node in the simulated namespace."""
    return f"node-{index}"


@dataclass(frozen=True)
class ValueRecord:
    """One registered version: a short description plus the content digest
    identifying that version's payload."""

    description: str
    content_ref: Key

    def __post_init__(self):
        if not self.content_ref:
            raise ValueError("content_ref must be non-empty")


class Namespace:
    """Multi-writer key/value store with per-(peer, key) single values."""

    def __init__(self, rng: random.Random | None = None):
        self._entries: dict[Key, dict[PeerId, ValueRecord]] = {}
        self._keys_by_peer: dict[PeerId, set[Key]] = {}
        self._name_of_key: dict[Key, str] = {}
        self._rng = rng if rng is not None else random.Random()

    def key_for(self, name: str) -> Key:
        """Digest a name, aborting the run if it collides with another name."""
        key = digest(name)
        known = self._name_of_key.get(key)
        if known is None:
            self._name_of_key[key] = name
        elif known != name:
            raise KeyCollisionError(
                f"names {known!r} and {name!r} share key {key.hex()}"
            )
        return key

    def put(self, peer: PeerId, key: Key, value: ValueRecord) -> None:
        """Store `value` under `key` for `peer`, replacing the peer's
        previous value there.  Other peers' values are untouched."""
        self._entries.setdefault(key, {})[peer] = value
        self._keys_by_peer.setdefault(peer, set()).add(key)

    def get(self, key: Key, limit: int | None = None) -> set[ValueRecord]:
        """All values stored under `key` by any peer.

        A limit models a download time cutoff: at most `limit` of the
        stored values are returned, sampled uniformly without replacement.
        """
        stored = self._entries.get(key)
        if not stored:
            return set()
        values = list(stored.values())
        if limit is not None and limit < len(values):
            values = self._rng.sample(values, limit)
        return set(values)

    def remove_peer(self, peer: PeerId) -> None:
        """Drop every value `peer` has stored, under every key."""
        for key in self._keys_by_peer.pop(peer, ()):
            stored = self._entries[key]
            del stored[peer]
            if not stored:
                del self._entries[key]

    def resolve(
        self, name: str, limit: int | None = None
    ) -> list[tuple[ValueRecord, int]]:
        """Version records registered under a node name, most popular first.

        Each record is paired with the number of distinct peers registered
        to it.  With a limit, counts are inferred from a uniform sample of
        the registrations, the way a download cutoff would see them.  Ties
        keep first-registration order, so the result is reproducible.
        """
        registrations = list(self._entries.get(self.key_for(name), {}).values())
        if limit is not None and limit < len(registrations):
            registrations = self._rng.sample(registrations, limit)
        counts: dict[ValueRecord, int] = {}
        for record in registrations:
            counts[record] = counts.get(record, 0) + 1
        return sorted(counts.items(), key=lambda item: -item[1])
