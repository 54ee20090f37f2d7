import random
import subprocess
import sys

from assertify._kernels import KERNEL_BACKEND, lcs_length, lcs_length_py


def oracle_lcs(a, b):
    n, m = len(a), len(b)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if a[i - 1] == b[j - 1]:
                dp[i][j] = dp[i - 1][j - 1] + 1
            else:
                dp[i][j] = max(dp[i - 1][j], dp[i][j - 1])
    return dp[n][m]


def test_backends_agree_on_random_inputs():
    rng = random.Random(7)
    for _ in range(200):
        a = [rng.randint(0, 9) for _ in range(rng.randint(0, 40))]
        b = [rng.randint(0, 9) for _ in range(rng.randint(0, 40))]
        expected = oracle_lcs(a, b)
        assert lcs_length(a, b) == expected
        assert lcs_length_py(a, b) == expected


def test_edge_cases():
    assert lcs_length([], []) == 0
    assert lcs_length([1, 2, 3], []) == 0
    assert lcs_length([1, 2, 3], [1, 2, 3]) == 3
    assert lcs_length([1, 2, 3], [3, 2, 1]) == 1


def test_backend_reports_its_kind():
    assert KERNEL_BACKEND in ("cython", "python")


def test_pure_python_opt_out():
    code = (
        "import assertify._kernels as k; "
        "print(k.KERNEL_BACKEND); print(k.lcs_length([1,2,3],[1,3]))"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True, text=True, check=True,
        env={"ASSERTIFY_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
    ).stdout.split()
    assert out == ["python", "2"]
