"""Write the four coordinate projections of the helical soliton as OBJ meshes."""
import sys
import tempfile
from pathlib import Path

from bdr.cli import main
from _common import data_path

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="bdr-"))
out.mkdir(parents=True, exist_ok=True)
for axis in "xyzw":
    main(["project", data_path("helical_soliton"), "--drop", axis,
          "--out", str(out / ("helical_soliton_no_%s.obj" % axis))])
