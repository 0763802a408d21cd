from src.instance.classification import classical_reduction, classify, is_classical
from src.instance.dsl import parse_instance_dsl, serialize_instance
from src.instance.model import Instance
from src.instance.orlib import parse_orlib
from src.instance.validation import validate_instance
from src.instance.loader import load_instance, load_instance_dir
