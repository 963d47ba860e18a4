import subprocess
import sys


def test_fallback_selected_without_extension():
    # a fresh interpreter that cannot import the compiled module lands on numpy
    code = (
        "import sys; sys.modules['kpower._ckernels'] = None\n"
        "import kpower, kpower.fringe_model as fm\n"
        "assert kpower.BACKEND == 'python', kpower.BACKEND\n"
        "assert fm.kernels.__name__ == 'kpower._pykernels'\n"
        "assert fm.normalized_intensity_at(fm.FringeParams(2), 0.0) == 1.0\n"
    )
    subprocess.run([sys.executable, "-c", code], check=True)
