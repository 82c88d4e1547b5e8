"""Client for the line-delimited JSON adapter wire protocol.

An adapter is a child process that reads one JSON request per stdin line
({"id": ..., "task": ..., "input": ...}) and writes one JSON response per
stdout line ({"id": ..., "output": ...} or {"id": ..., "error": ...}).
Responses may arrive in any order; the client matches them to requests by
id. A silence longer than the configured timeout marks every unresolved
item as errored; the rest of the batch is unaffected.
"""

from __future__ import annotations

import json
import logging
import queue
import subprocess
import threading
from dataclasses import dataclass
from typing import Sequence

from .errors import AdapterError

log = logging.getLogger(__name__)

_EOF = object()


@dataclass(frozen=True)
class AdapterEndpoint:
    command: tuple[str, ...]
    timeout: float = 30.0


@dataclass(frozen=True)
class AdapterFailure:
    index: int
    reason: str


class AdapterClient:
    """Owns one adapter process; not shared between worker lanes."""

    def __init__(self, endpoint: AdapterEndpoint):
        self.endpoint = endpoint
        self._counter = 0
        try:
            self._proc = subprocess.Popen(
                list(endpoint.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterError(
                f"cannot launch adapter {' '.join(endpoint.command)!r}: {exc}"
            ) from exc
        self._lines: queue.Queue[object] = queue.Queue()
        self._reader = threading.Thread(target=self._read_stdout, daemon=True)
        self._reader.start()

    def _read_stdout(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(_EOF)

    def request(
        self, texts: Sequence[str], task: str = "correct"
    ) -> tuple[list[str | None], list[AdapterFailure]]:
        """Pipeline all texts, collect responses by id. Returns one slot
        per input (None where the item failed) plus the failure records."""
        if self._proc.poll() is not None:
            raise AdapterError("adapter process is not running")
        assert self._proc.stdin is not None
        pending: dict[str, int] = {}
        outputs: list[str | None] = [None] * len(texts)
        failures: list[AdapterFailure] = []
        try:
            for i, text in enumerate(texts):
                rid = str(self._counter)
                self._counter += 1
                pending[rid] = i
                line = json.dumps(
                    {"id": rid, "task": task, "input": text}, ensure_ascii=False
                )
                self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterError(f"adapter pipe closed while writing: {exc}") from exc

        while pending:
            try:
                item = self._lines.get(timeout=self.endpoint.timeout)
            except queue.Empty:
                for rid, i in sorted(pending.items(), key=lambda kv: kv[1]):
                    failures.append(
                        AdapterFailure(i, f"timeout after {self.endpoint.timeout}s")
                    )
                pending.clear()
                break
            if item is _EOF:
                for rid, i in sorted(pending.items(), key=lambda kv: kv[1]):
                    failures.append(AdapterFailure(i, "adapter closed its output"))
                pending.clear()
                break
            assert isinstance(item, str)
            line = item.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                log.warning("ignoring malformed adapter line: %r", line[:200])
                continue
            rid = obj.get("id")
            if rid not in pending:
                log.warning("adapter response with unknown id %r", rid)
                continue
            index = pending.pop(rid)
            if "output" in obj:
                outputs[index] = obj["output"]
            elif "error" in obj:
                failures.append(AdapterFailure(index, f"adapter error: {obj['error']}"))
            else:
                failures.append(AdapterFailure(index, "response has no output field"))
        failures.sort(key=lambda f: f.index)
        return outputs, failures

    def close(self) -> None:
        if self._proc.stdin is not None and not self._proc.stdin.closed:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()
            self._proc.wait()

    def __enter__(self) -> AdapterClient:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()
