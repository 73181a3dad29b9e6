"""
Setup Checker Script
Run this to verify your environment before running experiments.
"""
import os
import sys
import tempfile


def check_setup():
    print("═" * 60)
    print("   Schatten Lab - Setup Checker")
    print("═" * 60)
    print()

    # Check Python version
    print("✓ Checking Python version...")
    if sys.version_info >= (3, 9):
        print(f"  ✓ Python {sys.version_info.major}.{sys.version_info.minor} (OK)")
    else:
        print(f"  ✗ Python {sys.version_info.major}.{sys.version_info.minor} (Need 3.9+)")
        return False
    print()

    # Check dependencies
    print("✓ Checking dependencies...")
    missing = []
    for module in ("numpy", "scipy"):
        try:
            mod = __import__(module)
            print(f"  ✓ {module} {mod.__version__}")
        except ImportError:
            print(f"  ✗ {module} - MISSING")
            missing.append(module)
    print()

    if missing:
        print("⚠ Missing packages detected!")
        print(f"  Run: pip install {' '.join(missing)}")
        print()
        return False

    # Batched decompositions are used by every sampler
    print("✓ Checking batched linear algebra...")
    import numpy as np

    try:
        rng = np.random.default_rng(0)
        batch = rng.standard_normal((3, 4, 4))
        s = np.linalg.svd(batch, compute_uv=False)
        q, _ = np.linalg.qr(batch)
        assert s.shape == (3, 4) and q.shape == (3, 4, 4)
        print("  ✓ batched svd / qr OK")
    except Exception as e:
        print(f"  ✗ batched linear algebra failed: {e}")
        return False
    print()

    # Check run registry
    print("✓ Checking run registry...")
    ok = True
    try:
        from database.run_registry import finish_run, list_runs, start_run

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "runs.db")
            run_id = start_run(path, "check", 0, {})
            finish_run(path, run_id, "ok")
            assert list_runs(path)[0]["status"] == "ok"
        print("  ✓ sqlite registry OK")
    except Exception as e:
        print(f"  ✗ Registry error: {e}")
        ok = False
    print()

    # Summary
    print("═" * 60)
    if ok:
        print("✅ Setup complete! Try: python main.py rate --p 1 --q 2 --N 4 --n 8")
    else:
        print("⚠ Please complete the setup steps above")
    print("═" * 60)
    return ok


if __name__ == "__main__":
    sys.exit(0 if check_setup() else 1)
