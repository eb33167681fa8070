"""
Django settings for the hlawka_lab project.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent


def env_bool(name: str, default: bool = False) -> bool:
    return os.getenv(name, str(default)).strip().lower() in {"1", "true", "yes", "on"}


def env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


def env_float(name: str, default: float) -> float:
    return float(os.getenv(name, repr(default)))


DEBUG = env_bool("DEBUG", True)

SECRET_KEY = os.getenv("SECRET_KEY", "")
if not SECRET_KEY:
    if DEBUG:
        SECRET_KEY = "django-insecure-dev-key-change-in-production"
    else:
        raise ValueError("SECRET_KEY must be set when DEBUG=False")

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'hlawka',
]

# Database
DATABASE_URL = os.getenv('DATABASE_URL')
if DATABASE_URL:
    import dj_database_url
    DATABASES = {
        'default': dj_database_url.config(default=DATABASE_URL, conn_max_age=600)
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': BASE_DIR / 'db.sqlite3',
        }
    }

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# REST Framework (serializers and the JSON renderer only)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': ['rest_framework.renderers.JSONRenderer'],
    'UNAUTHENTICATED_USER': None,
}

# Verification engine defaults
HLAWKA_TOL = env_float('HLAWKA_TOL', 1e-9)
HLAWKA_SEED = env_int('HLAWKA_SEED', 42)
HLAWKA_TRIALS = env_int('HLAWKA_TRIALS', 10000)
HLAWKA_DIMENSION = env_int('HLAWKA_DIMENSION', 5)
HLAWKA_CHUNK_SIZE = env_int('HLAWKA_CHUNK_SIZE', 4096)
HLAWKA_RESTARTS = env_int('HLAWKA_RESTARTS', 64)
HLAWKA_MAX_ITERS = env_int('HLAWKA_MAX_ITERS', 2000)
HLAWKA_STEP_INIT = env_float('HLAWKA_STEP_INIT', 0.1)
HLAWKA_GRAD_TOL = env_float('HLAWKA_GRAD_TOL', 1e-8)
HLAWKA_LOG_LEVEL = os.getenv('HLAWKA_LOG_LEVEL', 'INFO').upper()

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
        'hlawka': {
            'handlers': ['console'],
            'level': HLAWKA_LOG_LEVEL,
            'propagate': False,
        },
    },
}
