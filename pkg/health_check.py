#!/usr/bin/env python
"""
Health check and installation verification
"""
import os
import sys

from dotenv import load_dotenv

load_dotenv()


def check_environment():
    """Report the optional environment overrides"""
    print("\n🔍 Environment Check")
    print("-" * 50)

    optional_vars = {
        'GRIDMOD_CAP': 'default total-dimension cap for decompositions',
        'GRIDMOD_LOG_LEVEL': 'logging level (WARNING)',
    }

    for var, description in optional_vars.items():
        value = os.environ.get(var)
        if value:
            print(f"✅ {var}: {value}")
        else:
            print(f"ℹ️  {var}: not set, using default ({description})")
    print()


def check_imports():
    """Check if all required packages are importable"""
    print("🔍 Package Check")
    print("-" * 50)

    packages = {
        'numpy': 'dense integer matrices',
        'sympy': 'primality and polynomial factoring mod p',
        'pydantic': 'data validation',
        'dotenv': 'environment variables',
        'pytest': 'test runner',
    }

    missing = []
    for package, description in packages.items():
        try:
            __import__(package)
            print(f"✅ {package}: OK")
        except ImportError:
            print(f"❌ {package}: Missing ({description})")
            missing.append(package)

    if missing:
        print(f"\n⚠️  Action Required: Run 'pip install {' '.join(missing)}'")

    print()
    return not missing


def check_files():
    """Check if all required files exist"""
    print("🔍 File Check")
    print("-" * 50)

    required_files = [
        'run.py',
        'config.py',
        'core/linalg.py',
        'core/gridmod.py',
        'core/decomp.py',
        'core/endcurves.py',
        'core/boundary.py',
        'ingest/formats.py',
    ]

    ok = True
    for file in required_files:
        if os.path.exists(file):
            size = os.path.getsize(file)
            print(f"✅ {file} ({size} bytes)")
        else:
            print(f"❌ {file}: Missing")
            ok = False
    print()
    return ok


def validate_toolkit():
    """Compute a few known answers end to end"""
    print("🔍 Component Validation")
    print("-" * 50)

    try:
        from core.boundary import boundary_components, spread_boundary_oracle
        from core.counts import n2, n_bth, n_dth
        from core.gridmod import spread_module

        square = spread_module([(0, 0), (1, 0), (0, 1), (1, 1)], p=31)
        counts = (n2(square), n_bth(square), n_dth(square))
        if counts != (1, 1, 1):
            print(f"❌ Counts on the square spread: {counts}, expected (1, 1, 1)")
            return False
        print("✅ Counts: Verified")

        comps = boundary_components(square)
        expected = spread_boundary_oracle(square.support(), p=31)
        if len(comps) != 1 or comps[0].curve != expected.curve:
            print(f"❌ Boundary of the square spread: {[c.curve for c in comps]}")
            return False
        print("✅ Boundary: Verified")
        return True
    except Exception as e:
        print(f"❌ Component error: {e}")
        return False


def main():
    """Run all checks"""
    print("\n" + "=" * 50)
    print("🧮 GRIDMOD - INSTALLATION VERIFICATION")
    print("=" * 50)

    check_environment()
    packages_ok = check_imports()
    files_ok = check_files()

    if packages_ok and files_ok and validate_toolkit():
        print("\n" + "=" * 50)
        print("✅ ALL SYSTEMS GO!")
        print("=" * 50)
        return True
    print("\n" + "=" * 50)
    print("❌ CRITICAL ERROR: Check components above.")
    print("=" * 50)
    return False


if __name__ == '__main__':
    success = main()
    sys.exit(0 if success else 1)
