"""The public classical-channel dialog and key sifting.

Every message is appended to a Transcript in a fixed order and is readable
by anyone, including Eve.  The transcript serializes to JSON lines so a run
can be replayed offline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .alice import SlotMap

__all__ = [
    "MESSAGE_ORDER",
    "Message",
    "Transcript",
    "MonitorOutcome",
    "SiftResult",
    "compute_qber",
    "run_sifting",
]

MESSAGE_ORDER = (
    "DetectionReport",
    "DecoyDiscard",
    "VerificationRequest",
    "VerificationReveal",
    "CoherenceCheck",
    "MonitorReport",
    "Verdict",
    "KeyIndices",
)


@dataclass(frozen=True)
class Message:
    kind: str
    payload: dict


class TranscriptError(ValueError):
    """Raised on malformed or out-of-order transcripts."""


@dataclass
class Transcript:
    """Append-only, order-enforced record of the classical dialog."""

    messages: list[Message] = field(default_factory=list)

    def append(self, kind: str, payload: dict) -> None:
        if kind not in MESSAGE_ORDER:
            raise TranscriptError(f"unknown message kind: {kind}")
        rank = MESSAGE_ORDER.index(kind)
        if self.messages:
            last_rank = MESSAGE_ORDER.index(self.messages[-1].kind)
            if rank <= last_rank:
                raise TranscriptError(
                    f"{kind} may not follow {self.messages[-1].kind}"
                )
        self.messages.append(Message(kind, payload))

    def get(self, kind: str) -> dict:
        for msg in self.messages:
            if msg.kind == kind:
                return msg.payload
        raise TranscriptError(f"transcript has no {kind} message")

    def to_jsonl(self) -> str:
        lines = [
            json.dumps({"kind": m.kind, **m.payload}, sort_keys=True)
            for m in self.messages
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        out = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                kind = record.pop("kind")
            except (json.JSONDecodeError, KeyError) as exc:
                raise TranscriptError(f"bad transcript line {lineno}: {exc}") from exc
            out.append(kind, record)
        return out


@dataclass
class MonitorOutcome:
    """Monitor-line result for the boundaries Alice asked to be checked."""

    checked: np.ndarray
    clicked: np.ndarray

    def __post_init__(self):
        self.checked = np.asarray(self.checked, dtype=np.int64)
        self.clicked = np.asarray(self.clicked, dtype=np.int64)
        if not np.isin(self.clicked, self.checked).all():
            raise ValueError("clicked boundaries must be a subset of checked ones")

    @property
    def break_rate(self) -> float:
        if self.checked.size == 0:
            return 0.0
        return self.clicked.size / self.checked.size


@dataclass
class SiftResult:
    kept_indices: np.ndarray
    alice_key: np.ndarray
    bob_key: np.ndarray
    qber: float
    break_rate: float
    verdict: str
    verified_count: int


def compute_qber(pairs) -> float:
    """Mismatch fraction over revealed (alice, bob) bit pairs; 0 on empty."""
    pairs = list(pairs)
    if not pairs:
        return 0.0
    mismatches = sum(1 for a, b in pairs if a != b)
    return mismatches / len(pairs)


def run_sifting(
    slot_map: SlotMap,
    decoded_bits,
    monitor: MonitorOutcome,
    f_verify: float,
    alarm_threshold: float,
    rng: np.random.Generator,
) -> tuple[SiftResult, Transcript]:
    """Run the whole public dialog and extract the sifted key.

    Bob announces which slots he detected; Alice discards her decoys among
    them, samples a verification subset both sides reveal, and keeps the
    rest as key.  The verdict aborts when the monitor break rate exceeds
    the alarm threshold.
    """
    if not 0.0 <= f_verify < 1.0:
        raise ValueError(f"f_verify must be in [0, 1), got {f_verify}")

    slots = np.asarray([d.slot for d in decoded_bits], dtype=np.int64)
    values = np.asarray([d.value for d in decoded_bits], dtype=np.uint8)
    if slots.size and (slots.min() < 0 or slots.max() >= slot_map.n_slots):
        raise ValueError("decoded slot outside the slot map")

    order = np.argsort(slots)
    slots, values = slots[order], values[order]
    bob_value = dict(zip(slots.tolist(), values.tolist()))

    decoy_detected = slots[slot_map.is_decoy[slots]] if slots.size else slots
    remainder = slots[~slot_map.is_decoy[slots]] if slots.size else slots

    verify_mask = rng.random(remainder.size) < f_verify
    verify_slots = remainder[verify_mask]
    kept = remainder[~verify_mask]

    reveal_alice = slot_map.codes[verify_slots].astype(int)
    reveal_bob = np.array([bob_value[s] for s in verify_slots.tolist()], dtype=int)
    qber = compute_qber(zip(reveal_alice.tolist(), reveal_bob.tolist()))

    break_rate = monitor.break_rate
    verdict = "abort" if break_rate > alarm_threshold else "accept"

    alice_key = slot_map.codes[kept].astype(np.uint8)
    bob_key = np.array([bob_value[s] for s in kept.tolist()], dtype=np.uint8)

    transcript = Transcript()
    transcript.append("DetectionReport", {"slots": slots.tolist()})
    transcript.append("DecoyDiscard", {"slots": decoy_detected.tolist()})
    transcript.append("VerificationRequest", {"slots": verify_slots.tolist()})
    transcript.append(
        "VerificationReveal",
        {
            "slots": verify_slots.tolist(),
            "alice_bits": reveal_alice.tolist(),
            "bob_bits": reveal_bob.tolist(),
        },
    )
    transcript.append("CoherenceCheck", {"boundaries": monitor.checked.tolist()})
    transcript.append(
        "MonitorReport",
        {
            "boundaries": monitor.checked.tolist(),
            "clicks": np.isin(monitor.checked, monitor.clicked).astype(int).tolist(),
        },
    )
    transcript.append("Verdict", {"verdict": verdict})
    transcript.append("KeyIndices", {"slots": kept.tolist()})

    result = SiftResult(
        kept_indices=kept,
        alice_key=alice_key,
        bob_key=bob_key,
        qber=qber,
        break_rate=break_rate,
        verdict=verdict,
        verified_count=int(verify_slots.size),
    )
    return result, transcript
