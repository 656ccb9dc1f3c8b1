# Experiment profile settings
"""Profile settings for estimation experiments."""

from collections import OrderedDict

from syndromest.settings import config
from syndromest.settings import profiles


class ExperimentProfile(profiles.SettingsDict):
    """Experiment profile dictionary.

    Attributes:
        PATH_PREFIX (str): Prefix for experiment profile files.

    """
    PATH_PREFIX = "exp"

    def __init__(self, *args, **kwargs):
        super().__init__(self)
        self[self.NAME_KEY] = "default"

        # code: five_qubit, steane, or repetition:n
        self["code"] = config.CodeNames.FIVE_QUBIT.value
        self["levels"] = 2

        # truth noise
        self["p"] = 0.13  # rate of each of X, Y, Z
        self["p_m"] = None  # syndrome bit flip rate; None for perfect

        # initialization
        self["init_mode"] = config.InitModes.DIRICHLET
        self["alpha"] = 20
        self["dirichlet_convention"] = config.DirichletConventions.LITERAL

        # regularizer; None to disable
        self["beta"] = None
        self["pseudocount_form"] = config.PseudocountForms.COMPLEMENT

        # estimation
        self["estimator"] = config.Estimators.EM
        self["n_est"] = 1000
        self["n_iter"] = config.EM_N_ITER
        self["tol"] = config.EM_TOL
        self["n_trials"] = 10

        # evaluation
        self["n_decode_trials"] = 10 ** 4
        self["n_fisher_samples"] = 10 ** 5
        self["fisher_mode"] = config.FisherModes.AUTO

        # sweeps; None to use the single n_est and levels values
        self["n_est_sweep"] = None
        self["levels_sweep"] = None

        # master seed; mandatory for runs
        self["seed"] = None

        #: OrderedDict[str, dict]: Named presets.
        self.profiles = OrderedDict((
            # concatenated 5-qubit code, bad initialization, few iterations
            ("desk", {
                "levels": 2,
                "p": 0.13,
                "alpha": 20,
                "n_est": 1000,
                "n_iter": 5,
                "estimator": config.Estimators.EM,
            }),

            # hard assignments from MAP errors
            ("hard", {
                "estimator": config.Estimators.HEM,
            }),

            # both estimators on the same datasets
            ("both", {
                "estimator": config.Estimators.BOTH,
            }),

            # good initialization
            ("goodinit", {
                "alpha": 200,
            }),

            # phenomenological measurement noise
            ("measnoise", {
                "p": 0.005,
                "p_m": 0.005,
                "n_est": 10 ** 4,
                "n_iter": 40,
                "estimator": config.Estimators.BOTH,
            }),

            # Dirichlet prior around the initialization
            ("regularized", {
                "levels": 1,
                "alpha": 200,
                "beta": 200,
                "n_est": 100,
                "n_iter": 30,
            }),

            # initialization fixed at p, truth drawn around p
            ("fixedinit", {
                "init_mode": config.InitModes.FIXED_INIT,
            }),

            ("level1", {
                "levels": 1,
            }),

            ("level3", {
                "levels": 3,
            }),
        ))
