#!/usr/bin/env python3
"""Smoke test for the cssbkit_py extension module.

Build the extension first, then run this script from anywhere:

    cargo build -p cssbkit-py --release
    python3 python/smoke_test.py

The script loads the freshly built shared library, replays the prisoner's
dilemma checks (exact payoffs, solve under both deviation modes, penal-code
verification, stability audit, mode comparison), and exits nonzero on any
mismatch.
"""

import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent

PD = """{
  "players": ["1", "2"],
  "actions": [["C", "D"], ["C", "D"]],
  "payoffs": {
    "C,C": ["2", "2"],
    "C,D": ["0", "3"],
    "D,C": ["3", "0"],
    "D,D": ["1", "1"]
  },
  "delta": "3/5"
}"""


def load_module():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libcssbkit_py.so", "cssbkit_py.so", "libcssbkit_py.dylib")
    ]
    for built in candidates:
        if built.exists():
            staging = tempfile.mkdtemp(prefix="cssbkit_py_")
            shutil.copy2(built, pathlib.Path(staging) / "cssbkit_py.so")
            sys.path.insert(0, staging)
            import cssbkit_py

            return cssbkit_py
    sys.exit(
        "extension not found; run `cargo build -p cssbkit-py --release` first"
    )


def main():
    m = load_module()
    print(f"loaded cssbkit_py {m.__version__}")

    game = m.StageGame.parse(PD)
    assert game.players() == ["1", "2"]
    assert game.delta() == "3/5"
    assert game.payoff(["D", "C"]) == ["3", "0"]

    # Exact discounted payoffs.
    path = game.path("C,D | C,C")
    assert game.payoff_of(path) == ["6/5", "12/5"]
    assert game.path("C,C | C,C").literal() == "| C,C"
    assert path.tail(game, 2) == game.path("| C,C")
    print("payoffs ok")

    # Coalitional deviations kill constant defection; individual ones do not.
    coalition = m.solve(game, "coalition", 1, 1)
    assert "| C,C" in coalition["fixed_point"]
    assert "| D,D" not in coalition["fixed_point"]
    assert coalition["payoffs"]["| C,C"] == ["2", "2"]
    assert coalition["penal_code"] == {"1": "C,D | C,C", "2": "D,C | C,C"}
    nash = m.solve(game, "nash", 1, 1)
    assert "| D,D" in nash["fixed_point"]
    print("solve ok")

    # Penal-code verification: accept the textbook family, refuse mutual
    # defection as a punishment.
    good = m.verify(
        game,
        "coalition",
        game.path("| C,C"),
        [game.path("C,D | C,C"), game.path("D,C | C,C")],
    )
    assert good["accepted"]
    values = {
        (w["state"], w["deterring_player"], w["deviation_value"])
        for w in good["certificate"]
    }
    assert (0, "1", "48/25") in values
    assert (1, "2", "38/25") in values

    bad = m.verify(
        game,
        "coalition",
        game.path("| C,C"),
        [game.path("| D,D"), game.path("| D,D")],
    )
    assert not bad["accepted"]
    counter = bad["counterexample"]
    assert counter["state"] == 1
    assert counter["deviation"]["coalition"] == ["1", "2"]
    assert counter["margins"][0]["induced_value"] == "7/5"
    print("verify ok")

    # The solved set is a stable standard of behavior on its universe.
    standard = [game.path(lit) for lit in coalition["fixed_point"]]
    audit = m.stability(game, "coalition", standard, 1, 1)
    assert audit["internal"]["stable"]
    assert audit["external"]["stable"]
    broken = m.stability(game, "coalition", [game.path("| D,D")], 1, 1)
    assert not broken["internal"]["stable"]
    print("stability ok")

    comparison = m.compare(game, 1, 1)
    assert comparison["containment_holds"]
    assert comparison["nash_only"] == ["| D,D"]
    print("compare ok")

    print("smoke test passed")


if __name__ == "__main__":
    main()
