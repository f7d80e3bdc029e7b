"""Keyframe and shot captioning over an abstract vision-language client.

Keyframes are captioned with a context window of neighbouring frames and
the matching subtitle segment.  Shot-level captioning threads a bounded
memory string through the shots of a video, like an RNN hidden state, so
each caption can draw on what the model retained from earlier shots.

Clients implement `complete(prompt, images) -> str`.  An HTTP client talks
to a real model endpoint; a deterministic hash mock keeps tests offline.
"""

from __future__ import annotations

import hashlib
import logging
import os
import re
import time
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import requests

logger = logging.getLogger(__name__)

DEFAULT_CONTEXT_RADIUS = 2
DEFAULT_MEMORY_CHARS = 2000

CAPTION_RE = re.compile(r"<caption>(.*?)</caption>", re.DOTALL)
MEMORY_RE = re.compile(r"<memory>(.*?)</memory>", re.DOTALL)


class CaptioningError(RuntimeError):
    def __init__(self, message: str, keyframe_id: str | None = None):
        super().__init__(message)
        self.keyframe_id = keyframe_id


class LVLMClient(Protocol):
    def complete(self, prompt: str, images: Sequence[str]) -> str: ...


@dataclass(frozen=True)
class Shot:
    shot_index: int
    video_id: str
    keyframes: tuple[str, ...]  # image references (paths or ids)
    subtitle: str
    start_ms: int
    end_ms: int

    def __post_init__(self):
        if self.shot_index < 0:
            raise ValueError("shot_index must be >= 0")
        if not self.keyframes:
            raise ValueError("shot needs at least one keyframe")
        if self.start_ms > self.end_ms:
            raise ValueError("start_ms must not exceed end_ms")


@dataclass(frozen=True)
class ShotMemory:
    text: str = ""
    max_chars: int = DEFAULT_MEMORY_CHARS

    def __post_init__(self):
        if len(self.text) > self.max_chars:
            raise ValueError("memory exceeds its bound")

    def updated(self, text: str) -> "ShotMemory":
        """New memory with the text hard-truncated to the bound."""
        return ShotMemory(text[: self.max_chars], self.max_chars)


@dataclass(frozen=True)
class CaptionResult:
    caption: str
    memory: ShotMemory
    shot_index: int


@dataclass(frozen=True)
class ShotFailure:
    shot_index: int
    error: str


@dataclass(frozen=True)
class KeyframeContext:
    target: str
    before: tuple[str, ...] = ()
    after: tuple[str, ...] = ()
    subtitle_segment: str = ""
    k: int = DEFAULT_CONTEXT_RADIUS

    def __post_init__(self):
        if len(self.before) > self.k or len(self.after) > self.k:
            raise ValueError("context exceeds radius k")


def build_keyframe_prompt(ctx: KeyframeContext) -> tuple[str, list[str]]:
    """Single instruction prompt plus the ordered image list.

    Images go [before..., target, after...]; the target's position is
    called out in the prompt so the model never confuses it with context.
    """
    images = list(ctx.before) + [ctx.target] + list(ctx.after)
    target_pos = len(ctx.before) + 1
    lines = [
        "You caption one TARGET video frame. "
        f"You receive {len(images)} frame(s) in temporal order; "
        f"the TARGET frame is frame #{target_pos}. "
        "All other frames are context only and must not be described directly.",
    ]
    if ctx.before or ctx.after:
        lines.append(
            f"Context frames: {len(ctx.before)} before and {len(ctx.after)} after the target."
        )
    if ctx.subtitle_segment.strip():
        lines.append(f"Subtitle segment for this span: {ctx.subtitle_segment.strip()}")
    lines.append(
        "Follow these steps:\n"
        "1. Infer the contextual background from the context frames and subtitle.\n"
        "2. Analyze the entities, their attributes, and their interactions in the target frame.\n"
        "3. Pose and answer your own visual questions about the target frame until the"
        " description is complete.\n"
        "Reply with one detailed paragraph describing the target frame."
    )
    return "\n".join(lines), images


def caption_keyframe(ctx: KeyframeContext, lvlm: LVLMClient) -> str:
    """Caption one keyframe; raises CaptioningError on client failure."""
    prompt, images = build_keyframe_prompt(ctx)
    try:
        caption = lvlm.complete(prompt, images)
    except Exception as exc:
        raise CaptioningError(f"client failed: {exc}", keyframe_id=ctx.target) from exc
    if not caption.strip():
        raise CaptioningError("empty completion", keyframe_id=ctx.target)
    return caption


def build_shot_prompt(shot: Shot, memory_text: str, memory_bound: int) -> str:
    """Shot-captioning prompt requesting the two tagged reply sections."""
    lines = [
        f"You caption shot {shot.shot_index} of a video, given its keyframes"
        " in temporal order.",
    ]
    if shot.subtitle.strip():
        lines.append(f"Subtitle for this shot: {shot.subtitle.strip()}")
    if memory_text:
        lines.append(
            "Accumulated memory from the preceding shots (setting, characters,"
            f" actions): {memory_text}"
        )
    lines.append(
        "Write a detailed caption for this shot, then update the memory:"
        " keep details still relevant to the ongoing narrative, drop outdated ones,"
        f" and stay under {memory_bound} characters of memory.\n"
        "Reply with exactly two sections:"
        " <caption>the shot caption</caption><memory>the updated memory</memory>"
    )
    return "\n".join(lines)


def parse_shot_reply(reply: str) -> tuple[str, str]:
    """Extract the caption and memory sections; raises ValueError if absent."""
    cap = CAPTION_RE.search(reply)
    mem = MEMORY_RE.search(reply)
    if cap is None or mem is None or not cap.group(1).strip():
        raise ValueError("reply is missing the tagged caption/memory sections")
    return cap.group(1).strip(), mem.group(1).strip()


def caption_shots(
    shots: Sequence[Shot],
    lvlm: LVLMClient,
    memory_bound: int = DEFAULT_MEMORY_CHARS,
    use_memory: bool = True,
) -> tuple[list[CaptionResult], list[ShotFailure]]:
    """Left fold over one video's shots threading the memory string.

    With use_memory=False every prompt sees an empty memory, which makes
    each caption depend on its own shot only (the no-memory baseline).
    A failed shot is recorded and skipped; its predecessor's memory is
    carried forward so the recurrence survives.  A structurally bad reply
    gets one reprompt before counting as a failure.
    """
    if [s.shot_index for s in shots] != sorted(s.shot_index for s in shots):
        raise ValueError("shots must be ordered by shot_index")
    if len({s.video_id for s in shots}) > 1:
        raise ValueError("caption_shots handles one video at a time")
    memory = ShotMemory("", memory_bound)
    results: list[CaptionResult] = []
    failures: list[ShotFailure] = []
    for shot in shots:
        prompt = build_shot_prompt(shot, memory.text if use_memory else "", memory_bound)
        try:
            reply = lvlm.complete(prompt, shot.keyframes)
            try:
                caption, new_memory = parse_shot_reply(reply)
            except ValueError:
                strict = prompt + (
                    "\nYour previous reply was malformed. Use exactly the"
                    " <caption>...</caption><memory>...</memory> format."
                )
                reply = lvlm.complete(strict, shot.keyframes)
                caption, new_memory = parse_shot_reply(reply)
        except Exception as exc:
            logger.warning("shot %d failed: %s", shot.shot_index, exc)
            failures.append(ShotFailure(shot.shot_index, str(exc)))
            continue  # memory carried past the failure
        if use_memory:
            memory = memory.updated(new_memory)
        results.append(CaptionResult(caption, memory, shot.shot_index))
    return results, failures


class HashMockLVLM:
    """Deterministic offline stand-in: replies are digests of the inputs.

    When the prompt requests the two tagged sections, the mock emits them,
    so shot captioning chains digests exactly like the real recurrence.
    """

    def complete(self, prompt: str, images: Sequence[str]) -> str:
        digest = hashlib.sha256(
            prompt.encode("utf-8") + b"\x00" + "\x00".join(images).encode("utf-8")
        ).hexdigest()[:16]
        if "<caption>" in prompt:
            return f"<caption>cap-{digest}</caption><memory>mem-{digest}</memory>"
        return f"cap-{digest}"


class HTTPLVLMClient:
    """Minimal HTTP client: POSTs {prompt, images} JSON, reads {"text": ...}.

    Retries with exponential backoff; the API key is read from an
    environment variable so it never appears in configuration files.
    """

    def __init__(
        self,
        endpoint: str,
        api_key_env: str = "LVLM_API_KEY",
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff_s: float = 1.0,
    ):
        self.endpoint = endpoint
        self.api_key = os.environ.get(api_key_env, "")
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_s = backoff_s

    def complete(self, prompt: str, images: Sequence[str]) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {"prompt": prompt, "images": list(images)}
        last_exc: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                resp = requests.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout
                )
                resp.raise_for_status()
                return resp.json()["text"]
            except Exception as exc:
                last_exc = exc
                if attempt < self.max_retries:
                    time.sleep(self.backoff_s * 2**attempt)
        raise CaptioningError(f"LVLM endpoint failed after retries: {last_exc}")


def make_client(spec: str) -> LVLMClient:
    """'mock' for the hash mock, anything else is treated as an HTTP endpoint."""
    if spec == "mock":
        return HashMockLVLM()
    return HTTPLVLMClient(spec)


def write_captions(fh, video_id: str, results: Iterable[CaptionResult],
                   shots: Sequence[Shot]) -> None:
    """One `video_id<TAB>timestamp_ms<TAB>kind<TAB>caption` line per result."""
    from .index import escape_text

    by_index = {s.shot_index: s for s in shots}
    for res in results:
        ts = by_index[res.shot_index].start_ms
        fh.write(f"{video_id}\t{ts}\tcaption\t{escape_text(res.caption)}\n")
