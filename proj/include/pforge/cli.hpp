#pragma once

#include "pforge/surface.hpp"

#include <optional>
#include <string>

namespace pforge {

enum class Command { Solve, Scan, Mesh, Verify };
enum class OutFormat { Obj, Ply, Json, Csv };

struct RunConfig {
    Command command = Command::Solve;
    int k = 0;
    Family family = Family::CaseI;
    double tol = 1e-10;
    int grid = 32;
    int prescan = 200;
    int resolution = 64;
    int slabs = 1;
    double end_cutoff = 1e-3;
    std::string out_path;
    OutFormat format = OutFormat::Json;
    std::string solution_path;        // mesh, verify
    std::optional<double> a, b;       // verify with explicit moduli
    bool embed_check = false;         // mesh: face-distance test on the assembly
};

// Exit codes.
enum : int { ExitOk = 0, ExitUsage = 1, ExitSolver = 2, ExitMesh = 3, ExitVerify = 4 };

int cmd_solve(const RunConfig& cfg);
int cmd_scan(const RunConfig& cfg);
int cmd_mesh(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

// Parses argv into a RunConfig and dispatches; usage errors return 1.
int run_cli(int argc, char** argv);

} // namespace pforge
