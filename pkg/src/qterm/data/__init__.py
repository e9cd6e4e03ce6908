"""
Stored data for use during runtime or testing.

The packaged program files are plain ProgramFile JSON documents, so they can
be used as templates for writing new programs.
"""

from enum import Enum

from typing import Union
from typing import TypeVar, Type

T = TypeVar('T', bound="MyEnum")


def resource_filename(module, resource):
    """ Emulates the behaviour of the old setuptools resource_filename command.

    None of the files are zip files or create any temporary files that need
    to be cleaned up, so we can drop the context manager.
    """

    from importlib.resources import path
    with path(module, resource) as handler:
        filename = str(handler)

    return filename


class MyEnum(Enum):
    """ Base class for enums.

    Command line spellings use hyphens, python names use underscores.
    """

    def __str__(self) -> str:
        return self.name.replace("_", "-")

    @classmethod
    def from_string(cls: Type[T], s: str) -> T:
        try:
            return cls[s.replace("-", "_")]
        except KeyError:
            raise ValueError(f"Invalid {cls.__name__}: '{s}'")

    @classmethod
    def from_other(cls: Type[T], f: Union[str, int, "MyEnum"]) -> T:
        if isinstance(f, cls):
            return f
        elif isinstance(f, str):
            return cls.from_string(f)
        elif isinstance(f, int):
            return cls(f)
        else:
            raise ValueError("Expected an enum, string or integer.")


def sample_program_filepath() -> str:
    """ The nondeterministic four-cycle walk as a ProgramFile. """

    return resource_filename(__name__, "c4_nondet.json")
