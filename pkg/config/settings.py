"""
Django settings for FeketeLab project.
Exact computations around Fekete polynomials, holonomic series and
oscillation bounds, driven through management commands.
"""

from pathlib import Path
import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Environment variables
env = environ.Env(
    DEBUG=(bool, False),
    FEKETELAB_SEED=(int, 20240917),
    FEKETELAB_WORKERS=(int, 0),
    FEKETELAB_ROOT_TOLERANCE=(str, '1/1000000'),
    FEKETELAB_REFINEMENT_BUDGET=(int, 8),
    FEKETELAB_MAX_PRIME=(int, 2**31),
    LOG_LEVEL=(str, 'INFO'),
)

# Read .env file
environ.Env.read_env(BASE_DIR / '.env')

SECRET_KEY = env('SECRET_KEY', default='django-insecure-feketelab-local-only')

DEBUG = env('DEBUG')

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'apps.experiments',
]

# No persistence: every command is a pure computation.
DATABASES = {}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# FeketeLab Configuration
FEKETELAB_SEED = env('FEKETELAB_SEED')
FEKETELAB_WORKERS = env('FEKETELAB_WORKERS')  # 0 = one per CPU
FEKETELAB_ROOT_TOLERANCE = env('FEKETELAB_ROOT_TOLERANCE')
FEKETELAB_REFINEMENT_BUDGET = min(env('FEKETELAB_REFINEMENT_BUDGET'), 64)
FEKETELAB_MAX_PRIME = env('FEKETELAB_MAX_PRIME')
FEKETELAB_DATA_DIR = BASE_DIR / 'data'

LOG_LEVEL = env('LOG_LEVEL').upper()

# Logging (stderr only; stdout carries data)
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'apps': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'services': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
