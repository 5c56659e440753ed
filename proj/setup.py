import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent

        configure = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            "-DCMAKE_BUILD_TYPE=Release",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DSDNPART_PYTHON=ON",
        ]
        pybind11_dir = os.environ.get("pybind11_DIR")
        if pybind11_dir is None:
            try:
                import pybind11

                pybind11_dir = pybind11.get_cmake_dir()
            except ImportError:
                pass
        if pybind11_dir:
            configure.append(f"-Dpybind11_DIR={pybind11_dir}")
        subprocess.run(configure, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "--parallel"],
            check=True,
        )

        built = list((build_dir / "python" / "sdnpart").glob("_core*"))
        if not built:
            raise RuntimeError("CMake did not produce the _core module")
        out_dir.mkdir(parents=True, exist_ok=True)
        self.copy_file(str(built[0]), str(out_dir / built[0].name))


setup(
    ext_modules=[CMakeExtension("sdnpart._core")],
    cmdclass={"build_ext": CMakeBuild},
)
