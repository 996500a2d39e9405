import dataclasses
import enum
import hashlib
import json
import math

import numpy
import progress.bar
from django.core.serializers.json import DjangoJSONEncoder


PROGRESS_SUFFIX = '%(index).0f of %(max).0f - %(elapsed_td)s / %(eta_td)s'


class ResultEncoder(DjangoJSONEncoder):
    def default(self, o):
        if isinstance(o, numpy.integer):
            return int(o)
        elif isinstance(o, numpy.floating):
            return float(o)
        elif isinstance(o, numpy.ndarray):
            return o.tolist()
        elif isinstance(o, enum.Enum):
            return o.value
        elif hasattr(o, 'to_dict'):
            return o.to_dict()
        elif dataclasses.is_dataclass(o):
            return dataclasses.asdict(o)

        return super().default(o)


def jsonable(data):
    '''Replace non-finite floats by None, recursively'''
    if isinstance(data, dict):
        return {str(k): jsonable(v) for k, v in data.items()}
    elif isinstance(data, (list, tuple)):
        return [jsonable(v) for v in data]
    elif isinstance(data, numpy.ndarray):
        return jsonable(data.tolist())
    elif isinstance(data, (float, numpy.floating)):
        return float(data) if math.isfinite(data) else None
    elif isinstance(data, numpy.integer):
        return int(data)
    elif hasattr(data, 'to_dict'):
        return jsonable(data.to_dict())

    return data


def dump_json(data, **kwargs):
    kwargs.setdefault('sort_keys', True)
    return json.dumps(jsonable(data), cls=ResultEncoder, **kwargs)


def format_value(value):
    '''Shortest round-trip text for a CSV cell'''
    if value is None:
        return ''
    elif isinstance(value, bool):
        return 'true' if value else 'false'
    elif isinstance(value, (int, numpy.integer)):
        return str(int(value))
    elif isinstance(value, (float, numpy.floating)):
        return repr(float(value))
    elif isinstance(value, enum.Enum):
        return str(value.value)
    elif isinstance(value, (list, tuple, numpy.ndarray)):
        return ';'.join(format_value(v) for v in value)

    return str(value)


def parse_value(text):
    '''Inverse of :func:`format_value` for numbers; other text stays'''
    if text == '':
        return None

    try:
        return int(text)
    except ValueError:
        pass

    try:
        return float(text)
    except ValueError:
        return text


def derive_seed(master, *parts):
    '''A 63-bit seed determined by the master seed and a cell key'''
    key = '\x1f'.join(str(p) for p in (master,) + parts)
    digest = hashlib.sha256(key.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big') >> 1


def progress_bar(message, total, enabled=True):
    '''A terminal progress bar, or None when disabled'''
    if not enabled or not total:
        return None

    return progress.bar.Bar(message, max=total, suffix=PROGRESS_SUFFIX)
