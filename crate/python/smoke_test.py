"""Smoke test for the `asympt` extension module.

Build first:
    cargo build -p asympt-py --release --features extension-module
then run `python3 python/smoke_test.py`. The module is loaded from the
installed package if present, otherwise from target/release or target/debug.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load():
    try:
        import asympt

        return asympt
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libasympt.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("asympt", str(lib))
            spec = importlib.util.spec_from_loader("asympt", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            sys.modules["asympt"] = module
            return module
    sys.exit("asympt extension not found; build crates/py first")


def main():
    asympt = load()
    print("asympt", asympt.__version__)

    assert len(asympt.facons(3)) == 19
    assert "(3)[1,2]" in asympt.facons(3)
    assert asympt.facon_count_formula(4) == len(asympt.facons(4))

    f = asympt.Mapping.from_components(["x1", "x2", "x1*x2*x3"])
    assert f.degree == 3 and f.is_dominant()
    assert asympt.Mapping(f.render()).components == f.components

    r = asympt.classify(f, probe=True)
    assert r.realized_facons == ["(3)[1]", "(3)[2]", "(3)[1,2]"], r.realized_facons
    assert [c[0] for c in r.components] == ["α1 = 0", "α2 = 0"], r.components
    assert r.oracle_residual < 1e-6
    assert json.loads(r.to_json())["seed"] == asympt.DEFAULT_SEED
    print(r)

    p = asympt.classify(asympt.Mapping.from_components(["x1", "x2*x3", "x2 + x1^2"]))
    assert p.matched_type == 2 and p.components[0][1] == "paraboloid"

    assert asympt.classify(asympt.Mapping.from_components(["x1", "x2", "x3"])).proper

    points, fits = asympt.probe_fit(f, samples=2000, steps=4)
    assert points > 0 and fits
    for sig, eq, res, n in fits:
        print(f"  {sig:<10} {eq}  residual {res:.1e} ({n} points)")

    try:
        asympt.Mapping("dim 3\nF1 = x1 +\n")
    except ValueError as e:
        print("parse error reported:", e)
    else:
        raise AssertionError("bad input accepted")

    failed = [name for name, ok, _ in asympt.check(quick=True) if not ok]
    assert not failed, failed
    print("smoke test passed")


if __name__ == "__main__":
    main()
