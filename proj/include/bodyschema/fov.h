// Copyright 2026 The Bodyschema Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BODYSCHEMA_FOV_H_
#define BODYSCHEMA_FOV_H_

#include <Eigen/Dense>

namespace bodyschema {

// Sphere-sector visibility region of a camera: a point p is visible when
// min_range <= |p - camera| <= max_range and the angle between p - camera
// and the view direction is strictly below half_angle. A disabled field of
// view sees everything.
struct FieldOfView {
  bool enabled = false;
  Eigen::Vector3d camera_position = Eigen::Vector3d::Zero();
  Eigen::Vector3d view_direction = Eigen::Vector3d::UnitX();
  double half_angle = 0.0;  // radians
  double min_range = 0.0;
  double max_range = 0.0;

  bool Contains(const Eigen::Vector3d& point) const;
};

}  // namespace bodyschema

#endif  // BODYSCHEMA_FOV_H_
