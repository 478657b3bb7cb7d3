const AWS = require('aws-sdk');

const s3 = new AWS.S3();

exports.handler = async (event) => {
  const key = `exports/${event.id}.csv`;
  await s3.putObject({ Bucket: process.env.EXPORT_BUCKET, Key: key, Body: event.rows }).promise();
  return { written: key };
};
