from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals; nothing here is signed or served.
SECRET_KEY = config('SECRET_KEY', default='kset-lab-dev-key-not-for-deployment')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Third Party
    'rest_framework',

    # Local Apps
    'common.apps.CommonConfig',
    'rounds.apps.RoundsConfig',
    'graphkit.apps.GraphkitConfig',
    'predicates.apps.PredicatesConfig',
    'protocol.apps.ProtocolConfig',
    'simulator.apps.SimulatorConfig',
]

# No models are defined and no database is configured: scenarios, traces and
# reports live in JSON files handled by the management commands.
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# ============================================================================
# LOGGING
# ============================================================================
LOG_LEVEL = config('LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('common', 'rounds', 'graphkit', 'predicates', 'protocol', 'simulator')
    },
}


# ============================================================================
# SIMULATION LIMITS & DEFAULTS
# ============================================================================
# Largest system size accepted by scenario readers and generators.
# Predicate checking enumerates C(n, k+1) subsets, so keep this at desk scale.
KSET_MAX_PROCESSES = config('KSET_MAX_PROCESSES', default=16, cast=int)

# Default horizon is L + 3n + KSET_HORIZON_SLACK (L = prefix length)
KSET_HORIZON_SLACK = config('KSET_HORIZON_SLACK', default=1, cast=int)

# When a process may decide on its own: 'round-n' (from round n) or 'settled'
# (from round 2n - 2). simulate --decision-rule overrides it per run.
KSET_DECISION_RULE = config('KSET_DECISION_RULE', default='round-n')

# Random admissible-run sampler
KSET_RANDOM_MAX_ATTEMPTS = config('KSET_RANDOM_MAX_ATTEMPTS', default=200, cast=int)
KSET_RANDOM_EXTRA_EDGE_PROB = config('KSET_RANDOM_EXTRA_EDGE_PROB', default=0.3, cast=float)

# Output files
KSET_DOT_INCLUDE_SELF_LOOPS = config('KSET_DOT_INCLUDE_SELF_LOOPS', default=False, cast=bool)
KSET_JSON_INDENT = config('KSET_JSON_INDENT', default=2, cast=int)
