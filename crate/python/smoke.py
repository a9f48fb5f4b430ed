"""Smoke test for the exphier_py extension.

Build first:
    cargo build -p exphier-py --release --features extension-module
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load():
    try:
        import exphier_py

        return exphier_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libexphier_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("exphier_py", str(lib))
            spec = importlib.util.spec_from_loader("exphier_py", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("exphier_py not found; build it with --features extension-module")


def main():
    ex = load()
    k5 = "5 10\n" + "".join(f"{i} {j}\n" for i in range(5) for j in range(i + 1, 5))

    report = json.loads(ex.decompose(k5))
    assert report["passed"], report

    tree, bags = ex.hierarchy(k5)
    assert "node 0 level 0" in tree
    assert bags.startswith("bag 0:")

    lines = [json.loads(l) for l in ex.dynamic(k5, "QC 0 4\nD 0 4\nQF 0 4\n", audit=True)]
    assert lines[0]["answer"] == {"connected": True, "exact": True}
    assert lines[1]["answer"]["exact"] == 3
    assert lines[1]["answer"]["estimate"] >= 3
    assert lines[-1]["summary"]["updates"] == 1

    h = ex.Hierarchy("4 2\n0 1\n2 3\n")
    assert not h.connected(0, 3)
    h.insert(1, 2)
    assert h.connected(0, 3)
    h.delete(1, 2)
    assert not h.connected(0, 3)
    assert json.loads(h.check())["checks"]
    try:
        h.delete(1, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("deleting a missing edge should raise")
    print("python smoke: ok")


if __name__ == "__main__":
    main()
