from __future__ import annotations

import sys

import pytest

from dstkit.adapter import AdapterClient, AdapterEndpoint
from dstkit.conformance import run_conformance
from dstkit.correction import correct_with_adapter
from dstkit.errors import AdapterError

from conftest import HELPERS

ECHO = (sys.executable, str(HELPERS / "echo_adapter.py"))


def endpoint(*flags: str, timeout: float = 10.0) -> AdapterEndpoint:
    return AdapterEndpoint(ECHO + flags, timeout=timeout)


def test_echo_round_trip():
    outputs, failures = correct_with_adapter(["a", "b"], endpoint())
    assert outputs == ["a", "b"]
    assert failures == []


def test_echo_unicode_exact():
    text = "héllo wörld ☕ — ok"
    outputs, failures = correct_with_adapter([text], endpoint())
    assert outputs == [text] and not failures


def test_out_of_order_responses_matched_by_id():
    outputs, failures = correct_with_adapter(
        ["one", "two", "three", "four"], endpoint("--swap-pairs")
    )
    assert outputs == ["one", "two", "three", "four"]
    assert failures == []


def test_silent_item_times_out_others_survive():
    outputs, failures = correct_with_adapter(
        ["a", "b", "c", "d"], endpoint("--drop-index", "2", timeout=1.0)
    )
    assert outputs == ["a", "b", None, "d"]
    assert [f.index for f in failures] == [2]
    assert "timeout" in failures[0].reason


def test_garbage_lines_skipped():
    outputs, failures = correct_with_adapter(
        ["a", "b", "c"], endpoint("--garbage-every", "2")
    )
    assert outputs == ["a", "b", "c"]
    assert failures == []


def test_error_response_reported_per_item():
    outputs, failures = correct_with_adapter(
        ["a", "b"], endpoint("--error-index", "1")
    )
    assert outputs == ["a", None]
    assert [f.index for f in failures] == [1]
    assert "boom" in failures[0].reason


def test_client_reusable_across_batches():
    with AdapterClient(endpoint()) as client:
        first, _ = client.request(["x"])
        second, _ = client.request(["y"])
    assert first == ["x"] and second == ["y"]


def test_launch_failure_raises():
    with pytest.raises(AdapterError):
        AdapterClient(AdapterEndpoint(("/nonexistent/adapter-binary",)))


def test_mock_adapter_passes_conformance():
    checks = run_conformance(ECHO)
    failing = [c for c in checks if not c.passed]
    assert failing == [], failing
    assert {c.name for c in checks} == {
        "echo-identity",
        "id-bijection",
        "malformed-line-error",
        "recovers-after-malformed",
        "clean-exit-on-eof",
    }
