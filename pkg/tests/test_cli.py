import json

import pytest

from tracecity.cli import main
from tracecity.protocol import encode_message, write_trace_file
from tracecity.scenarios import build_scenario


def test_simulate_to_file_then_analyze_table(tmp_path, capsys):
    out = tmp_path / "demo.trace.ndjson"
    assert main(["simulate", "figure3", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["analyze", str(out), "--window-ms", "6000"]) == 0
    table = capsys.readouterr().out
    assert "main()" in table
    assert "33.33%" in table
    assert "16.67%" in table


def test_analyze_json_format(tmp_path, capsys):
    out = tmp_path / "leak.trace.ndjson"
    assert main(["simulate", "thread-leak", "--restarts", "16", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["analyze", str(out), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    top = report["methods"][0]
    assert top["method"] == "run()"
    assert top["peak_elevation"] == 1.0
    assert top["threads"] == 16


def test_analyze_empty_trace_exits_zero(tmp_path, capsys):
    path = tmp_path / "empty.trace.ndjson"
    path.write_text("")
    assert main(["analyze", str(path)]) == 0
    assert "no events" in capsys.readouterr().out


def test_usage_errors_exit_one(tmp_path, capsys):
    trace = tmp_path / "t.trace.ndjson"
    write_trace_file(trace, build_scenario("figure3"))
    assert main(["replay", str(trace), "--speed", "0"]) == 1
    assert main(["replay", str(tmp_path / "missing.ndjson")]) == 1
    assert main(["simulate", "no-such-scenario"]) == 1
    assert main(["simulate", "duty-cycle", "--duty", "1.5", "--out", "x"]) == 1
    assert main(["simulate", "thread-leak", "--restarts", "0", "--out", "x"]) == 1
    assert main(["analyze", str(trace), "--window-ms", "0"]) == 1
    capsys.readouterr()


def test_replay_empty_trace_completes_immediately(tmp_path, capsys):
    import socket
    import threading

    trace = tmp_path / "empty.trace.ndjson"
    trace.write_text("")
    server = socket.socket()
    server.bind(("127.0.0.1", 0))
    server.listen(1)
    port = server.getsockname()[1]
    threading.Thread(target=lambda: server.accept()[0].recv(4096), daemon=True).start()
    try:
        assert main(["replay", str(trace), "--port", str(port)]) == 0
    finally:
        server.close()
    assert "replayed 0 messages" in capsys.readouterr().out


def test_connection_refused_exits_two(tmp_path):
    trace = tmp_path / "t.trace.ndjson"
    write_trace_file(trace, build_scenario("figure3"))
    # nothing listens on this port
    assert main(["replay", str(trace), "--port", "1", "--host", "127.0.0.1"]) == 2
    assert main(["simulate", "figure3", "--port", "1", "--host", "127.0.0.1", "--pace", "fast"]) == 2


def test_corrupt_trace_replay_exits_three(tmp_path, capsys):
    trace = tmp_path / "bad.trace.ndjson"
    lines = [encode_message(m) for m in build_scenario("figure3")]
    lines[0] = "{corrupt"
    trace.write_text("\n".join(lines) + "\n")

    import socket
    import threading

    server = socket.socket()
    server.bind(("127.0.0.1", 0))
    server.listen(1)
    port = server.getsockname()[1]
    sink = threading.Thread(target=lambda: server.accept()[0].recv(1 << 20), daemon=True)
    sink.start()
    try:
        assert main(["replay", str(trace), "--port", str(port)]) == 3
    finally:
        server.close()
    capsys.readouterr()


def test_help_and_unknown_command(capsys):
    assert main(["--help"]) == 0
    assert "simulate" in capsys.readouterr().out
    assert main(["frobnicate"]) == 1
    capsys.readouterr()
