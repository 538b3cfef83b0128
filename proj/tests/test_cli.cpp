#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const std::string out = "test_cli_stdout.txt";
  const std::string err = "test_cli_stderr.txt";
  const std::string cmd =
      std::string(EXPMAP_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("classify") {
  const Run a = run("classify --measure uniform --lambda 1.0");
  CHECK(a.status == 0);
  CHECK(contains(a.out, "classification=FixedPoint"));
  CHECK(contains(a.out, "iter,sup_gap,l1_gap,F_at_0\n"));
  CHECK(contains(a.out, "# expmap classify --measure uniform --lambda 1.0\n"));
  CHECK(contains(a.out, "# seed=0\n"));
  CHECK_FALSE(contains(a.out, "\r"));

  const Run b = run("classify --measure dirac:t=0.5 --lambda 3.0 --out test_cli_trace.csv "
                    "--fixed-point-out test_cli_envelopes.csv");
  CHECK(b.status == 0);
  CHECK(contains(b.out, "classification=PeriodTwo"));
  CHECK(contains(slurp("test_cli_trace.csv"), "classification=PeriodTwo"));
  CHECK(contains(slurp("test_cli_envelopes.csv"), "x,L,U\n"));
}

TEST_CASE("solve") {
  const Run r = run("solve --family dirac --lambda 2.718281828");
  CHECK(r.status == 0);
  CHECK(contains(r.out, "family,lambda,param_name,param_value,residual\n"));
  CHECK(contains(r.out, "dirac,2.7182818279999998,M,0.36787944"));

  const Run p = run("solve --family dirac --lambda 3");
  CHECK(contains(p.out, ",L,0.13611988327877"));
  CHECK(contains(p.out, ",U,0.66473976227916"));

  CHECK(contains(run("solve --family uniform --lambda 1").out, "uniform,1,A,1.4776700622632"));
  CHECK(run("solve --family gamma --lambda 1").status == 2);
  CHECK(run("solve --family uniform --lambda -1").status == 2);
}

TEST_CASE("verify") {
  const Run r = run("verify --measure exp:a=1 --lambda 2 --grid 1024");
  CHECK(r.status == 0);
  CHECK(contains(r.out, "family,lambda,grid,param_name,param_value,sup_residual,bound,status\n"));
  CHECK(contains(r.out, ",PASS\n"));
  CHECK(run("verify --measure atoms:0.5@0.2,0.5@0.6 --lambda 1").status == 2);
}

TEST_CASE("matching commands") {
  const std::string args =
      "simulate-matching --measure uniform --lambda 1 --n 60 --samples 20 --replicates 20000 "
      "--seed 17 --grid 512";
  const Run a = run(args);
  CHECK(a.status == 0);
  CHECK(contains(a.out,
                 "n,lambda,measure,samples,empirical_mean,empirical_se,analytic_value,analytic_se,seed\n"));
  CHECK(contains(a.out, "60,1,uniform,20,"));
  CHECK(contains(a.out, ",17\n"));
  const Run b = run(args + " --workers 1");
  const auto body = [](const std::string& s) { return s.substr(s.find("n,lambda")); };
  CHECK(body(a.out) == body(b.out));
  CHECK(run(args).out == a.out);

  CHECK(run("simulate-matching --measure dirac:t=0.5 --lambda 1 --n 20 --samples 4").status == 2);

  const Run k = run("recursion-check --lambda 1 --samples 20000 --seed 2 --grid 512");
  CHECK(k.status == 0);
  CHECK(contains(k.out, "lambda,measure,from,samples,ks,seed\n"));
  CHECK(run("recursion-check --lambda 1 --samples 20000 --seed 2 --grid 512").out == k.out);
}

TEST_CASE("bad configuration exits with status 2") {
  const Run m = run("classify --measure gauss --lambda 1");
  CHECK(m.status == 2);
  CHECK(contains(m.err, "uniform | exp:a=<float> | dirac:t=<float>"));
  CHECK(run("classify --grid 8").status == 2);
  CHECK(run("classify --lambda 0").status == 2);
  CHECK(run("classify --tol -1").status == 2);
  CHECK(run("classify --bogus-flag").status == 2);
  CHECK(run("").status == 2);
  CHECK(run("classify --help").status == 0);
}
