import contextlib
import io
import json
import os
import tempfile
import unittest

from dimer import control


def run(*argv):
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout):
        with contextlib.redirect_stderr(io.StringIO()):
            try:
                control.main(list(argv))
            except SystemExit as e:
                return e.code, stdout.getvalue()
    raise AssertionError("main returned without exiting")


class testCommands(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.dir.name, "out.csv")

    def tearDown(self):
        self.dir.cleanup()

    def read(self):
        with open(self.out, encoding="utf-8") as fd:
            return fd.read().splitlines()

    def testNess(self):
        status, _ = run("ness", "-s", "epsilon_d=0.1", "-s", "omega_d=6.5556",
                        "-o", self.out)

        self.assertEqual(0, status)
        lines = self.read()
        self.assertEqual(3, len(lines))
        self.assertTrue(lines[1].startswith("omega_d,epsilon_d,"))

    def testProtocolJson(self):
        status, _ = run("protocol", "-s", "epsilon_d=0.1", "--format",
                        "json", "-o", self.out)

        self.assertEqual(0, status)
        with open(self.out, encoding="utf-8") as fd:
            document = json.load(fd)
        row = dict(zip(document["columns"], document["rows"][0]))
        self.assertAlmostEqual(6.5556, row["omega_d"], delta=1e-3)
        self.assertGreater(row["n_S"], 0.8)

    def testConfigFile(self):
        config = os.path.join(self.dir.name, "run.conf")
        with open(config, "w", encoding="utf-8") as fd:
            fd.write("# sweep\nomega_d_points = 3\nepsilon_d_points = 2\n"
                     "epsilon_d_min = 0.05\nepsilon_d_max = 0.1\n")

        status, _ = run("sweep", "-c", config, "-o", self.out)

        self.assertEqual(0, status)
        self.assertEqual(2 + 6, len(self.read()))

    def testCurve(self):
        status, _ = run("curve", "-s", "epsilon_d_points=3", "-o", self.out)

        self.assertEqual(0, status)
        lines = self.read()
        self.assertEqual(2 + 3, len(lines))
        omegas = [float(line.split(",")[0]) for line in lines[2:]]
        self.assertTrue(all(b > a for a, b in zip(omegas, omegas[1:])))

    def testFlagsOverrideSettings(self):
        status, _ = run("protocol", "-s", "epsilon_d=0.1", "-s",
                        "target=singlet", "--target", "triplet0",
                        "-o", self.out)

        self.assertEqual(0, status)
        row = dict(zip(self.read()[1].split(","), self.read()[2].split(",")))
        self.assertAlmostEqual(6.4545, float(row["omega_d"]), delta=2e-3)

    def testDark(self):
        status, _ = run("dark", "-s", "epsilon_d=0.1", "-o", self.out)

        self.assertEqual(0, status)
        lines = self.read()
        row = dict(zip(lines[1].split(","), lines[2].split(",")))
        self.assertAlmostEqual(5.902, float(row["omega_d"]), delta=1e-3)
        self.assertGreaterEqual(float(row["n_Tminus"]), 0.99)

    def testOraclePass(self):
        status, output = run("oracle", "-s", "g=0.05", "-s",
                             "epsilon_d=0.25", "-s", "tolerance=1",
                             "--nmax", "2")

        self.assertEqual(0, status)
        lines = output.splitlines()
        self.assertTrue(lines[0].startswith("effective omega_d = "))
        self.assertTrue(lines[1].startswith("oracle omega_d = "))
        self.assertEqual(4, sum(1 for line in lines if line.endswith(" ok")))
        self.assertIn("oracle omega_d at n_max 3 = ", output)
        self.assertTrue(lines[-1].startswith("truncation delta = "))

    def testOracleFail(self):
        status, output = run("oracle", "-s", "g=0.05", "-s",
                             "epsilon_d=0.25", "-s", "tolerance=1e-12",
                             "-s", "refine_oracle=false", "--nmax", "2")

        self.assertEqual(1, status)
        self.assertIn("FAIL", output)

    def testOracleCap(self):
        status, _ = run("oracle", "-s", "epsilon_d=0.25", "--nmax", "5")
        self.assertEqual(2, status)

    def testWindow(self):
        status, output = run("window", "-s", "gamma=1.0")
        self.assertEqual(0, status)
        self.assertEqual("empty", output.strip())

    def testUnknownKey(self):
        status, _ = run("ness", "-s", "bogus=1")
        self.assertEqual(2, status)

    def testMissingKey(self):
        status, _ = run("ness", "-s", "epsilon_d=0.1")
        self.assertEqual(2, status)

    def testMissingConfigFile(self):
        status, _ = run("protocol", "-c",
                        os.path.join(self.dir.name, "nowhere.conf"))
        self.assertEqual(2, status)

    def testPerturbationBreakdown(self):
        status, _ = run("ness", "-s", "epsilon_d=0", "-s", "omega_d=7.01")
        self.assertEqual(1, status)
        self.assertFalse(os.path.exists(self.out))

    def testNoCommand(self):
        status, _ = run()
        self.assertEqual(2, status)

    def testInstatrace(self):
        trace = os.path.join(self.dir.name, "trace")
        status, _ = run("--instatrace", trace, "ness", "-s", "epsilon_d=0.1",
                        "-s", "omega_d=6.5556", "-o", self.out)

        self.assertEqual(0, status)
        with open(trace, encoding="utf-8") as fd:
            stats = [line.split()[0] for line in fd]
        self.assertIn("Ness.populations_us", stats)
        self.assertIn("Ness.liouvillian_us", stats)

if __name__ == '__main__':
    unittest.main()
