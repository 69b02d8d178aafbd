from dotenv import load_dotenv
from joblib import cpu_count
import os

load_dotenv()


class Config:
    def __init__(self):
        # parallelism
        self.THREADS = int(os.getenv("BERGKERN_THREADS", str(cpu_count())))
        self.LOG_LEVEL = os.getenv("BERGKERN_LOG_LEVEL", "WARNING")

        # series kernel
        self.MAX_DEGREE = int(os.getenv("BERGKERN_MAX_DEGREE", "120"))

        # moment quadrature
        self.CLOSED_FORM_TOL = float(os.getenv("BERGKERN_CLOSED_FORM_TOL", "1e-9"))
        self.CUSTOM_TOL = float(os.getenv("BERGKERN_CUSTOM_TOL", "1e-6"))
        self.QUAD_MAX_BOXES = int(os.getenv("BERGKERN_QUAD_MAX_BOXES", "4000"))

        # verification
        self.ANGULAR_NODES = int(os.getenv("BERGKERN_ANGULAR_NODES", "64"))
        self.MC_SAMPLES = int(os.getenv("BERGKERN_MC_SAMPLES", "200000"))
        self.VERIFY_TOL = float(os.getenv("BERGKERN_VERIFY_TOL", "1e-6"))

        if self.THREADS < 1:
            self.THREADS = 1


config = Config()
