//! Local HTTP interface over a [`Session`]: per-energy poles and derived
//! quantities, trajectory editing with optimistic concurrency, and live
//! resonance contributions.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get};
use axum::{Json, Router};
use num_complex::Complex64;
use regge_core::regge_analysis::{FollowMode, Selection, ThetaMode, Trajectory};
use regge_core::scattering::UnfoldedKind;
use regge_core::workflow::{ContributionQuery, Session, TrajectoryRequest};
use regge_core::Error;
use serde::{Deserialize, Serialize};

pub type Shared = Arc<RwLock<Option<Session>>>;

pub fn shared(session: Option<Session>) -> Shared {
    Arc::new(RwLock::new(session))
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/energies", get(energies))
        .route("/poles/{k}", get(poles))
        .route("/zeros/{k}", get(zeros))
        .route("/unfolded/{k}", get(unfolded))
        .route("/deflection/{k}", get(deflection))
        .route("/dcs/{k}", get(dcs))
        .route("/contributions", get(contributions))
        .route("/trajectories", get(trajectories).post(post_trajectory))
        .route("/trajectories/{label}", delete(delete_trajectory))
        .with_state(state)
}

pub async fn serve(state: Shared, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<[f64; 2]>>,
}

pub enum ApiError {
    NoSession,
    Core(Error),
    Internal(String),
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError::Core(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NoSession => (
                StatusCode::CONFLICT,
                ErrorBody {
                    code: "no_session".into(),
                    message: "no analysis session is loaded".into(),
                    candidates: None,
                },
            ),
            ApiError::Internal(m) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                ErrorBody {
                    code: "internal".into(),
                    message: m,
                    candidates: None,
                },
            ),
            ApiError::Core(e) => {
                let status = match &e {
                    Error::Conflict(_) => StatusCode::CONFLICT,
                    e if e.is_input_error() => StatusCode::BAD_REQUEST,
                    _ => StatusCode::UNPROCESSABLE_ENTITY,
                };
                let candidates = match &e {
                    Error::Selection { candidates, .. } => {
                        Some(candidates.iter().map(|z| [z.re, z.im]).collect())
                    }
                    _ => None,
                };
                (
                    status,
                    ErrorBody {
                        code: e.code().into(),
                        message: e.to_string(),
                        candidates,
                    },
                )
            }
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

// Runs `f` on a blocking thread under the read lock.
async fn read<T, F>(state: Shared, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Session) -> Result<T, Error> + Send + 'static,
{
    tokio::task::spawn_blocking(move || {
        let guard = state.read().map_err(|_| ApiError::Internal("session lock poisoned".into()))?;
        let session = guard.as_ref().ok_or(ApiError::NoSession)?;
        f(session).map(Json).map_err(ApiError::from)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn write<T, F>(state: Shared, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&mut Session) -> Result<T, Error> + Send + 'static,
{
    tokio::task::spawn_blocking(move || {
        let mut guard = state.write().map_err(|_| ApiError::Internal("session lock poisoned".into()))?;
        let session = guard.as_mut().ok_or(ApiError::NoSession)?;
        f(session).map(Json).map_err(ApiError::from)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EnergyEntry {
    pub index: usize,
    pub energy: f64,
}

async fn energies(State(s): State<Shared>) -> ApiResult<Vec<EnergyEntry>> {
    read(s, |session| {
        Ok(session
            .energies()
            .into_iter()
            .enumerate()
            .map(|(index, energy)| EnergyEntry { index, energy })
            .collect())
    })
    .await
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct PoleEntry {
    pub id: usize,
    pub re: f64,
    pub im: f64,
    pub residue_re: f64,
    pub residue_im: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct PoleList {
    pub energy: f64,
    pub poles: Vec<PoleEntry>,
}

async fn poles(State(s): State<Shared>, Path(k): Path<usize>) -> ApiResult<PoleList> {
    read(s, move |session| {
        let c = session.analysis(k)?.candidates();
        Ok(PoleList {
            energy: c.energy,
            poles: c
                .poles
                .iter()
                .enumerate()
                .map(|(id, p)| {
                    let j = p.j();
                    PoleEntry {
                        id,
                        re: j.re,
                        im: j.im,
                        residue_re: p.residue.re,
                        residue_im: p.residue.im,
                    }
                })
                .collect(),
        })
    })
    .await
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ZeroEntry {
    pub id: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ZeroList {
    pub energy: f64,
    pub zeros: Vec<ZeroEntry>,
}

async fn zeros(State(s): State<Shared>, Path(k): Path<usize>) -> ApiResult<ZeroList> {
    read(s, move |session| {
        let a = session.analysis(k)?;
        Ok(ZeroList {
            energy: a.energy(),
            zeros: a
                .set
                .zeros
                .iter()
                .enumerate()
                .map(|(id, z)| ZeroEntry { id, re: z.re, im: z.im })
                .collect(),
        })
    })
    .await
}

#[derive(Debug, Deserialize)]
struct KindQuery {
    kind: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct UnfoldedPoint {
    pub phi: f64,
    pub re: f64,
    pub im: f64,
}

async fn unfolded(
    State(s): State<Shared>,
    Path(k): Path<usize>,
    Query(q): Query<KindQuery>,
) -> ApiResult<Vec<UnfoldedPoint>> {
    let kind = match q.kind.as_str() {
        "f" => UnfoldedKind::F,
        "g" => UnfoldedKind::G,
        other => {
            return Err(Error::Validation(format!("kind must be f or g, got '{other}'")).into());
        }
    };
    read(s, move |session| {
        Ok(session
            .unfolded(k, kind)?
            .into_iter()
            .map(|(phi, z)| UnfoldedPoint { phi, re: z.re, im: z.im })
            .collect())
    })
    .await
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct DeflectionPoint {
    pub j: f64,
    pub theta: f64,
}

async fn deflection(State(s): State<Shared>, Path(k): Path<usize>) -> ApiResult<Vec<DeflectionPoint>> {
    read(s, move |session| {
        Ok(session
            .deflection(k)?
            .into_iter()
            .map(|(j, theta)| DeflectionPoint { j, theta })
            .collect())
    })
    .await
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct DcsPoint {
    pub theta_deg: f64,
    pub dcs: f64,
}

async fn dcs(State(s): State<Shared>, Path(k): Path<usize>) -> ApiResult<Vec<DcsPoint>> {
    read(s, move |session| {
        Ok(session
            .dcs(k)?
            .into_iter()
            .map(|(theta_deg, dcs)| DcsPoint { theta_deg, dcs })
            .collect())
    })
    .await
}

/// Query string of `GET /contributions`: comma-separated labels, a mode
/// (`forward`, `backward` or `sideway`), the sideways angle in degrees and
/// the power (1 or 2).
#[derive(Debug, Default, Deserialize)]
pub struct ContributionParams {
    pub labels: Option<String>,
    pub mode: Option<String>,
    pub theta: Option<f64>,
    pub power_np: Option<u8>,
}

impl ContributionParams {
    fn to_query(&self) -> Result<ContributionQuery, Error> {
        let mode = match (self.mode.as_deref(), self.theta) {
            (None, None) => None,
            (Some("forward"), None) => Some(ThetaMode::Forward),
            (Some("backward"), None) => Some(ThetaMode::Backward),
            (Some("sideway") | None, Some(t)) => Some(ThetaMode::Sideway(t.to_radians())),
            (Some("sideway"), None) => {
                return Err(Error::Validation("mode=sideway needs theta".into()));
            }
            (Some(m), _) => {
                return Err(Error::Validation(format!(
                    "mode '{m}' is not forward, backward or sideway (theta only goes with sideway)"
                )));
            }
        };
        if let Some(np) = self.power_np {
            if np != 1 && np != 2 {
                return Err(Error::Validation(format!("power_np must be 1 or 2, got {np}")));
            }
        }
        Ok(ContributionQuery {
            labels: self.labels.as_ref().map(|l| {
                l.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            }),
            mode,
            power_np: self.power_np,
        })
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ContributionEntry {
    pub energy: f64,
    pub mode: String,
    /// Sideways angle in degrees; absent for forward and backward rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub tail: f64,
    pub background: f64,
    pub exact: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Contributions {
    pub revision: u64,
    pub rows: Vec<ContributionEntry>,
}

async fn contributions(
    State(s): State<Shared>,
    Query(p): Query<ContributionParams>,
) -> ApiResult<Contributions> {
    let query = p.to_query()?;
    read(s, move |session| {
        let rows = session
            .contributions_with(&query)?
            .into_iter()
            .map(|r| {
                let (mode, theta) = match r.mode {
                    ThetaMode::Forward => ("forward", None),
                    ThetaMode::Backward => ("backward", None),
                    ThetaMode::Sideway(t) => ("sideway", Some(t.to_degrees())),
                };
                ContributionEntry {
                    energy: r.energy,
                    mode: mode.into(),
                    theta,
                    tail: r.tail,
                    background: r.background,
                    exact: r.exact,
                }
            })
            .collect();
        Ok(Contributions {
            revision: session.revision(),
            rows,
        })
    })
    .await
}

/// A pole pick: `{"id": n}`, `{"near": [re, im]}` or `"skip"`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Pick {
    Id(usize),
    Near([f64; 2]),
    Skip,
}

impl From<Pick> for Selection {
    fn from(p: Pick) -> Self {
        match p {
            Pick::Id(i) => Selection::Index(i),
            Pick::Near([re, im]) => Selection::Near(Complex64::new(re, im)),
            Pick::Skip => Selection::Skip,
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EnergyPick {
    pub energy: f64,
    pub pick: Pick,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct NewTrajectory {
    pub label: String,
    #[serde(default = "automatic")]
    pub mode: FollowMode,
    pub seed: Pick,
    #[serde(default)]
    pub picks: Vec<EnergyPick>,
    pub revision: u64,
}

fn automatic() -> FollowMode {
    FollowMode::Automatic
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryPoint {
    pub energy: f64,
    pub re: f64,
    pub im: f64,
    pub residue_re: f64,
    pub residue_im: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TrajectorySummary {
    pub label: String,
    pub mode: FollowMode,
    pub points: Vec<TrajectoryPoint>,
    pub gaps: Vec<f64>,
}

impl From<&Trajectory> for TrajectorySummary {
    fn from(t: &Trajectory) -> Self {
        TrajectorySummary {
            label: t.label.clone(),
            mode: t.mode,
            points: t
                .points
                .iter()
                .map(|p| {
                    let j = p.j();
                    TrajectoryPoint {
                        energy: p.energy,
                        re: j.re,
                        im: j.im,
                        residue_re: p.residue.re,
                        residue_im: p.residue.im,
                    }
                })
                .collect(),
            gaps: t.gaps.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryList {
    pub revision: u64,
    pub trajectories: Vec<TrajectorySummary>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryChange {
    pub revision: u64,
    pub trajectory: TrajectorySummary,
}

async fn trajectories(State(s): State<Shared>) -> ApiResult<TrajectoryList> {
    read(s, |session| {
        Ok(TrajectoryList {
            revision: session.revision(),
            trajectories: session.trajectories().iter().map(Into::into).collect(),
        })
    })
    .await
}

async fn post_trajectory(
    State(s): State<Shared>,
    Json(body): Json<NewTrajectory>,
) -> ApiResult<TrajectoryChange> {
    let req = TrajectoryRequest {
        label: body.label,
        mode: body.mode,
        seed: body.seed.into(),
        picks: body.picks.iter().map(|p| (p.energy, p.pick.into())).collect(),
        revision: body.revision,
    };
    write(s, move |session| {
        let t = session.add_trajectory(&req)?;
        Ok(TrajectoryChange {
            revision: session.revision(),
            trajectory: (&t).into(),
        })
    })
    .await
}

#[derive(Debug, Deserialize)]
struct RevisionQuery {
    revision: Option<u64>,
}

async fn delete_trajectory(
    State(s): State<Shared>,
    Path(label): Path<String>,
    Query(q): Query<RevisionQuery>,
) -> ApiResult<TrajectoryChange> {
    write(s, move |session| {
        let t = session.remove_trajectory(&label, q.revision)?;
        Ok(TrajectoryChange {
            revision: session.revision(),
            trajectory: (&t).into(),
        })
    })
    .await
}
