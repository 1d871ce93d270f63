"""
Django settings for the defgeo project.

Everything tunable is read from the environment (or a .env file) through
python-decouple, so batch runs can raise or lower the engine guards without
touching code.
"""

from pathlib import Path

import dj_database_url
from decouple import config


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used for Django's own signing machinery; the engine never signs anything.
SECRET_KEY = config('SECRET_KEY', default='defgeo-local-only-secret-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition
INSTALLED_APPS = [
    'django.contrib.contenttypes',

    # Local apps
    'geometry.apps.GeometryConfig',
]

MIDDLEWARE = []


# ============================================
# DATABASE
# ============================================
# Fingerprint cache and classification history. SQLite unless DATABASE_URL says otherwise.

DATABASES = {
    'default': dj_database_url.config(
        default=config('DATABASE_URL', default=f"sqlite:///{BASE_DIR / 'defgeo.sqlite3'}")
    )
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True


# ============================================
# LOGGING
# ============================================

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
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
        'geometry': {
            'handlers': ['console'],
            'level': config('DEFGEO_LOG_LEVEL', default='WARNING'),
            'propagate': False,
        },
    },
}


# ============================================
# ENGINE LIMITS
# ============================================
# Validated by geometry.limits.EngineLimits. Defaults keep worst-case memory under ~1 GiB.

DEFGEO_LIMITS = {
    'arity_cap': config('DEFGEO_ARITY_CAP', default=9, cast=int),
    'arity_cap_binary': config('DEFGEO_ARITY_CAP_BINARY', default=16, cast=int),
    'memory_cap_mib': config('DEFGEO_MEMORY_CAP_MIB', default=1024, cast=int),
    'family_cap': config('DEFGEO_FAMILY_CAP', default=2 ** 25, cast=int),
    'oracle_cap': config('DEFGEO_ORACLE_CAP', default=2 ** 20, cast=int),
    'clone_cap': config('DEFGEO_CLONE_CAP', default=2 ** 20, cast=int),
    'composition_cap': config('DEFGEO_COMPOSITION_CAP', default=2 ** 26, cast=int),
    'seed_cap': config('DEFGEO_SEED_CAP', default=2 ** 22, cast=int),
    'generator_arity_cap': config('DEFGEO_GENERATOR_ARITY_CAP', default=None,
                                  cast=lambda v: int(v) if v not in (None, '') else None),
    'ed_bound': config('DEFGEO_ED_BOUND', default=4, cast=int),
    'canonical_check_bound': config('DEFGEO_CANONICAL_CHECK_BOUND', default=6, cast=int),
    'algebraic_max_universe': config('DEFGEO_ALGEBRAIC_MAX_UNIVERSE', default=2, cast=int),
    'workers': config('DEFGEO_WORKERS', default=1, cast=int),
}

# Version tag written at the top of every classification report.
DEFGEO_REPORT_VERSION = 'defgeo-report v1'
