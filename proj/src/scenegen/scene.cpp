#include "scenegen/scene.h"

#include "core/rng.h"

namespace dualray {

Mat3 Primitive::rotation_at(int frame) const {
    double angle = spin_rate * double(frame);
    return Eigen::AngleAxisd(angle, spin_axis).toRotationMatrix() * rotation;
}

SceneSpec sample_scene(uint64_t seed) {
    SceneSpec scene;
    scene.seed = seed;
    Rng rng(mix_seed(seed, 0x7363656e));

    auto unit_vec = [&rng]() {
        // Rejection-free: normalize a gaussian triple.
        Vec3 v(rng.normal(), rng.normal(), rng.normal());
        double n = v.norm();
        return n < 1e-9 ? Vec3(0, 1, 0) : Vec3(v / n);
    };

    int count = kMinObjects + int(rng.uniform_index(kMaxObjects - kMinObjects + 1));
    const Vec3& spawn = scene.spawn_half_extent;
    for (int i = 0; i < count; ++i) {
        Primitive obj;
        obj.kind = rng.uniform() < 0.5 ? Primitive::Kind::Sphere : Primitive::Kind::Box;
        obj.center = Vec3(rng.uniform(-spawn.x(), spawn.x()),
                          rng.uniform(-spawn.y(), spawn.y() - 0.1),
                          rng.uniform(-spawn.z(), spawn.z()));
        if (obj.kind == Primitive::Kind::Sphere) {
            double r = rng.uniform(0.15, kMaxObjectSize);
            obj.half_extent = Vec3(r, r, r);
        } else {
            obj.half_extent = Vec3(rng.uniform(0.1, 0.4), rng.uniform(0.1, 0.4),
                                   rng.uniform(0.1, 0.4));
            obj.rotation = Eigen::AngleAxisd(rng.uniform(0, 2 * M_PI), unit_vec())
                               .toRotationMatrix();
        }
        obj.albedo = Vec3(rng.uniform(0.15, 0.95), rng.uniform(0.15, 0.95),
                          rng.uniform(0.15, 0.95));
        obj.velocity = Vec3(rng.uniform(-kMaxVelocity, kMaxVelocity),
                            rng.uniform(-kMaxVelocity, kMaxVelocity),
                            rng.uniform(-kMaxVelocity, kMaxVelocity));
        obj.spin_axis = unit_vec();
        obj.spin_rate = rng.uniform(-kMaxSpinRate, kMaxSpinRate);
        scene.objects.push_back(obj);
    }
    return scene;
}

}  // namespace dualray
