#pragma once

namespace reserveflow {

// serial is the reference path; parallel must agree with it bit for bit.
enum class Execution { serial, parallel };

}  // namespace reserveflow
