import sys
import importlib

packages = [
    "numpy",
    "scipy",
    "pydantic",
    "dotenv",
    "langgraph",
    "pytest",
    "hypothesis",
]

print(f"Python: {sys.version}")

for package in packages:
    try:
        module = importlib.import_module(package)
        version = getattr(module, "__version__", "unknown")
        print(f"✅ {package}: {version}")
    except Exception as e:
        print(f"❌ {package}: FAILED - {e}")

try:
    from electrovac.reducer.tools.quadrature import integrate_adaptive
    import math

    value = integrate_adaptive(lambda x: 1.0 / (2 * x * x - 2 * x + 1), 0.0, 1.0).value
    print(f"✅ quadrature smoke test: {value!r} (pi/2 = {math.pi / 2!r})")
except Exception as e:
    print(f"❌ electrovac import: FAILED - {e}")
