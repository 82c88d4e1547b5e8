"""Wire-protocol conformance checks runnable against any adapter command.

The suite drives an echo-mode adapter over its real stdin/stdout and
verifies the protocol contract: id matching, one response per request in
any order, recovery from malformed request lines, and a clean exit on EOF.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
from dataclasses import dataclass
from typing import Sequence

from .errors import AdapterError


@dataclass(frozen=True)
class ConformanceCheck:
    name: str
    passed: bool
    detail: str = ""


class _RawAdapter:
    def __init__(self, command: Sequence[str]):
        try:
            self.proc = subprocess.Popen(
                list(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterError(f"cannot launch adapter: {exc}") from exc
        self._lines: queue.Queue[object] = queue.Queue()
        threading.Thread(target=self._pump, daemon=True).start()

    def _pump(self) -> None:
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def send(self, line: str) -> None:
        assert self.proc.stdin is not None
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()

    def read(self, timeout: float) -> str | None:
        try:
            item = self._lines.get(timeout=timeout)
        except queue.Empty:
            return None
        return item if isinstance(item, str) else None

    def close_stdin(self) -> None:
        assert self.proc.stdin is not None
        self.proc.stdin.close()

    def finish(self, timeout: float) -> int | None:
        try:
            return self.proc.wait(timeout=timeout)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()
            return None


def run_conformance(
    command: Sequence[str], timeout: float = 10.0
) -> list[ConformanceCheck]:
    """Run every check against an echo-mode adapter command."""
    checks: list[ConformanceCheck] = []
    adapter = _RawAdapter(command)

    def responses(n: int) -> list[dict]:
        out = []
        for _ in range(n):
            line = adapter.read(timeout)
            if line is None:
                break
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError:
                out.append({"_malformed": line})
        return out

    # echo identity, including unicode
    inputs = ["hello", "héllo wörld ☕", "id like a 4 star guesthouse"]
    for i, text in enumerate(inputs):
        adapter.send(json.dumps({"id": f"e{i}", "task": "correct", "input": text},
                                ensure_ascii=False))
    got = responses(len(inputs))
    by_id = {r.get("id"): r for r in got}
    ok = all(by_id.get(f"e{i}", {}).get("output") == text
             for i, text in enumerate(inputs))
    checks.append(ConformanceCheck(
        "echo-identity", ok, "" if ok else f"got {got!r}"))

    # one response per pipelined request, ids bijective, any order allowed
    ids = [f"p{i}" for i in range(5)]
    for rid in ids:
        adapter.send(json.dumps({"id": rid, "task": "correct", "input": rid}))
    got = responses(len(ids))
    seen = [r.get("id") for r in got]
    ok = sorted(seen) == sorted(ids)
    checks.append(ConformanceCheck(
        "id-bijection", ok, "" if ok else f"ids {seen!r}"))

    # malformed request line: error response with null id, then recovery
    adapter.send("not-a-record")
    err = responses(1)
    ok = bool(err) and err[0].get("id") is None and "error" in err[0]
    checks.append(ConformanceCheck(
        "malformed-line-error", ok, "" if ok else f"got {err!r}"))
    adapter.send(json.dumps({"id": "after", "task": "correct", "input": "still here"}))
    got = responses(1)
    ok = bool(got) and got[0].get("id") == "after" and got[0].get("output") == "still here"
    checks.append(ConformanceCheck(
        "recovers-after-malformed", ok, "" if ok else f"got {got!r}"))

    # EOF on stdin: clean exit 0
    adapter.close_stdin()
    code = adapter.finish(timeout)
    checks.append(ConformanceCheck(
        "clean-exit-on-eof", code == 0, "" if code == 0 else f"exit {code!r}"))
    return checks
