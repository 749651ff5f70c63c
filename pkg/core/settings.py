"""
Django settings for the SPF-lab project.
"""

import os
from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals; nothing here is served over HTTP.
SECRET_KEY = config('SECRET_KEY', default='spflab-local-only-secret-key')

DEBUG = config('DEBUG', default=False, cast=bool)

# Application definition
INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    # Third party apps
    'rest_framework',

    # Local apps
    'apps.core',
    'apps.norms',
    'apps.blaschke',
    'apps.symmetrize',
    'apps.bounds',
    'apps.search',
]

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# SPF-lab configuration
SPFLAB_VERSION = '1.0.0'
SPFLAB_THREADS = config('SPFLAB_THREADS', default=os.cpu_count() or 1, cast=int)

# Norm engines
SPFLAB_SUP_RTOL = config('SPFLAB_SUP_RTOL', default=1e-10, cast=float)
SPFLAB_LP_PANEL_TOL = config('SPFLAB_LP_PANEL_TOL', default=1e-12, cast=float)

# Multistart search
SPFLAB_SEARCH_MULTISTARTS = config('SPFLAB_SEARCH_MULTISTARTS', default=32, cast=int)
SPFLAB_SEARCH_BUDGET = config('SPFLAB_SEARCH_BUDGET', default=20000, cast=int)
SPFLAB_SEARCH_RTOL = config('SPFLAB_SEARCH_RTOL', default=1e-7, cast=float)

# Logging Configuration
SPFLAB_LOG_LEVEL = config('SPFLAB_LOG_LEVEL', default='INFO')
SPFLAB_LOG_FILE = BASE_DIR / config('SPFLAB_LOG_FILE', default='logs/spflab.log')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': SPFLAB_LOG_LEVEL,
            'class': 'logging.FileHandler',
            'filename': SPFLAB_LOG_FILE,
            'formatter': 'verbose',
        },
        # stderr, so that stdout only carries JSON/CSV payloads
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console', 'file'],
        'level': 'WARNING',
    },
    'loggers': {
        'apps': {
            'handlers': ['console', 'file'],
            'level': SPFLAB_LOG_LEVEL,
            'propagate': False,
        },
        'core': {
            'handlers': ['console', 'file'],
            'level': SPFLAB_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Create logs directory if it doesn't exist
os.makedirs(SPFLAB_LOG_FILE.parent, exist_ok=True)
