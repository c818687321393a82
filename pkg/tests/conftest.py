import os

# Small dense problems: multithreaded BLAS spin-wait costs far more than it
# saves, so pin the pools before numpy initializes them.
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import threadpoolctl  # noqa: E402

threadpoolctl.threadpool_limits(1)
