"""
Django settings for the renormlab project.

There is no HTTP surface: Django provides settings, the ORM for optional
norm evaluation records, the test runner and the management commands.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/
"""

from pathlib import Path
import os

import dj_database_url
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / '.env')


# Only used by Django internals; nothing is signed or served
SECRET_KEY = os.environ.get('SECRET_KEY', 'renormlab-local-only')

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'rest_framework',
    'tree_core.apps.TreeCoreConfig',
    'weights.apps.WeightsConfig',
    'operators.apps.OperatorsConfig',
    'norms.apps.NormsConfig',
    'probes.apps.ProbesConfig',
    'cli.apps.CliConfig',
]

MIDDLEWARE = []


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases
# Only norm --record writes here; SQLite unless DATABASE_URL says otherwise

DATABASES = {
    'default': dj_database_url.config(
        default=f'sqlite:///{BASE_DIR / "db.sqlite3"}',
        conn_max_age=600,
    )
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Serializers are used for document validation only
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}


# renormlab library settings; every key has a default in utils.rational.DEFAULTS
RENORMLAB = {
    'NODE_BUDGET': int(os.environ.get('RENORMLAB_NODE_BUDGET', 10000)),
    'KADEC_NODE_BUDGET': int(os.environ.get('RENORMLAB_KADEC_NODE_BUDGET', 20)),
    'LUR_INDEX_CAP': 8,
    'MLUR_INDEX_CAP': 5,
    'KADEC_TRUNCATION': 40,
    'KADEC_TOLERANCE_BITS': 40,
    'SQRT_BITS': int(os.environ.get('RENORMLAB_SQRT_BITS', 64)),
    'SCHEMA_VERSION': 1,
    'TOOL_VERSION': '0.1.0',
}


# Logging
RENORMLAB_LOG_LEVEL = os.environ.get('RENORMLAB_LOG_LEVEL', 'INFO')

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
        'django': {'handlers': ['console'], 'level': 'WARNING'},
        **{
            app: {'handlers': ['console'], 'level': RENORMLAB_LOG_LEVEL, 'propagate': False}
            for app in ('tree_core', 'weights', 'operators', 'norms', 'probes', 'cli', 'utils')
        },
    },
}
