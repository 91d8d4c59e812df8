#pragma once

#include "inflatable_arm/chain.hpp"
#include "inflatable_arm/errors.hpp"
#include "inflatable_arm/hilberry_joint.hpp"
#include "inflatable_arm/point_cloud.hpp"
#include "inflatable_arm/presets.hpp"
#include "inflatable_arm/rigid_transform.hpp"
#include "inflatable_arm/sim_service.hpp"
#include "inflatable_arm/spec_json.hpp"
#include "inflatable_arm/statics.hpp"
#include "inflatable_arm/tendon_routing.hpp"
#include "inflatable_arm/units.hpp"
