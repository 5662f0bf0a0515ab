from importlib.resources import files


def data_path(name):
    return str(files("bdr") / "data" / ("%s.bdr" % name))


CORPUS = ("helical_soliton", "helix_cylinder", "clifford_breathing")
