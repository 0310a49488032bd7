#pragma once

namespace stabilrl {
struct BenchmarkProblem;
}
