"""crlab: invariant surface energies, Euler-Lagrange residuals and
singular Yamabe expansions on model pseudohermitian 3-manifolds."""

from .ambient import (HEISENBERG, SPHERE3, AmbientModel, AmbientPoint,
                      HorizontalFrame, ModelKind, connection_form_coeffs,
                      contact_data, contact_geodesic, geodesic_speed)
from .energy import (EnergyReport, QuadratureSpec, ibp_check, integrate)
from .errors import (ChartDomainError, CrlabError, DegenerateChartError,
                     FitIllConditionedError, HcrZeroError,
                     NonconvergenceWarning, SingularPointError, StepSizeError,
                     SupportError)
from .invariants import (ELResiduals, InvariantJet, da1_density, da2_density,
                         el_residual_e1, el_residual_e2, el_residuals,
                         frak_f, h_coefficients, h_derivatives, hcr, jet_at)
from .surfaces import (AdaptedFrameData, ChartAxis, CylinderHeis,
                       FoliatedGraph, GraphHeis, RotationalHeis,
                       SingularSetInfo, SurfaceFamily, SurfacePoint, TorusS3,
                       TorusGraphS3, VerticalPlane, adapted_frame, area_form,
                       family_from_json, singular_set)
from .varcheck import (FamilyScan, VariationCheck, bump, first_variation_check,
                       scan_family)
from .yamabe import (RenormCoefficients, RenormFit, YamabeExpansion,
                     direct_volume_fit, exact_form_check, expansion_coeffs,
                     pde_residual_cylinder, renorm_coefficients,
                     volume_densities)

__version__ = "0.1.0"
